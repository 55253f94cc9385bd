#pragma once

#include <stdexcept>
#include <string>

namespace nmqed {

/// Invalid or inconsistent field/atom/run configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a function (pole, branch point, non-positive frequency...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed: non-convergence, overflow, NaN during marching.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Propagator amplitude with |u| > 1 + tolerance.
class UnphysicalPropagator : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace nmqed
