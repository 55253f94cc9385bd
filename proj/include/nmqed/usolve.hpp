#pragma once

// Three routes to u(t): Volterra marching, Bromwich inversion, and the
// resonance pole; plus rate extraction.

#include "nmqed/bromwich.hpp"
#include "nmqed/poles.hpp"
#include "nmqed/rates.hpp"
#include "nmqed/trajectory.hpp"
#include "nmqed/volterra.hpp"
