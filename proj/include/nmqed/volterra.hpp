#pragma once

// u(t) from the integro-differential equation
//   u' + i omega_0 u + int_0^t mu(t - s) u(s) ds = 0,  u(0) = 1,
// marched in the frame rotating at omega~, where it reads
//   v(t) = 1 - int_0^t R(t - s) v(s) ds,   R(tau) = -c + int_0^tau K,
// with c the static shift. R is handled exactly through per-cell kernel
// moments and v is interpolated linearly (product trapezoid rule); a second
// solve at half the step removes the leading h^2 error.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nmqed/error.hpp"
#include "nmqed/fieldspec.hpp"
#include "nmqed/kernel_view.hpp"
#include "nmqed/trajectory.hpp"

namespace nmqed {

struct VolterraOptions {
  bool richardson = true; // combine steps h and h/2
};

namespace detail {

// Rotating-frame solution v_n, n = 0 .. steps.
template <class Kernel>
std::vector<cplx> march_volterra(const Kernel& kernel, double omega_tilde, double h, std::size_t steps) {
  const CellMoments mom = cell_moments(kernel, omega_tilde, h, steps);
  // A_m = int_cell R, B_m = int_cell R * (r/h); v enters as (A-B) v_{j+1} + B v_j.
  std::vector<cplx> B(steps), C(steps);
  cplx R = -static_shift(kernel);
  for (std::size_t m = 0; m < steps; ++m) {
    const cplx A = h * R + h * mom.k0[m] - mom.k1[m];
    B[m] = 0.5 * h * R + (h * h * mom.k0[m] - mom.k2[m]) / (2.0 * h);
    C[m] = A - B[m];
    R += mom.k0[m];
  }
  // Combined weight of v_j for j >= 1: W_m = B_{m-1} + C_m with m = n - j.
  std::vector<cplx> W(steps + 1, 0.0);
  for (std::size_t m = 1; m < steps; ++m) W[m] = B[m - 1] + C[m];

  std::vector<cplx> v(steps + 1);
  v[0] = 1.0;
  const cplx diag = 1.0 + C[0];
  for (std::size_t n = 1; n <= steps; ++n) {
    // sum_{j=1}^{n-1} W_{n-j} v_j, in real arithmetic so it vectorizes.
    double re = 0.0, im = 0.0;
    const cplx* w = W.data() + n - 1;
    for (std::size_t j = 1; j < n; ++j, --w) {
      re += w->real() * v[j].real() - w->imag() * v[j].imag();
      im += w->real() * v[j].imag() + w->imag() * v[j].real();
    }
    const cplx acc = B[n - 1] * v[0] + cplx(re, im);
    const cplx next = (1.0 - acc) / diag;
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag()) || std::abs(next) > 1e6) {
      throw NumericalError("solve_u_volterra: instability at step " + std::to_string(n));
    }
    v[n] = next;
  }
  return v;
}

} // namespace detail

/// u(t_n) on t_n = n dt up to the first grid point >= T.
template <class Kernel>
UTrajectory solve_u_volterra(const Kernel& kernel, const AtomSpec& atom, double T, double dt,
                             VolterraOptions opt = {}) {
  validate_kernel(kernel);
  atom.validate();
  if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("solve_u_volterra: dt must be > 0");
  if (!(std::isfinite(T) && T >= dt)) throw ConfigError("solve_u_volterra: need T >= dt");
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double w = atom.omega_tilde;

  std::vector<cplx> v = detail::march_volterra(kernel, w, dt, steps);
  std::vector<double> err;
  if (opt.richardson) {
    const auto half = detail::march_volterra(kernel, w, 0.5 * dt, 2 * steps);
    err.resize(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
      const cplx diff = half[2 * n] - v[n];
      v[n] = half[2 * n] + diff / 3.0;
      err[n] = std::abs(diff) / 3.0;
    }
  }
  UTrajectory out;
  out.dt = dt;
  out.values.resize(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    out.values[n] = std::exp(cplx(0.0, -w * dt * static_cast<double>(n))) * v[n];
  }
  out.values[0] = 1.0;
  out.error = std::move(err);
  return out;
}

} // namespace nmqed
