#pragma once

// Instantaneous rates from u'/u = -(Gamma(t) + i Omega(t)), taken as the
// derivative of log u so that exact exponentials are reproduced exactly.

#include <cmath>
#include <complex>
#include <vector>

#include "nmqed/error.hpp"
#include "nmqed/trajectory.hpp"

namespace nmqed {

struct RateSeries {
  double dt = 0.0;
  std::vector<double> gamma;
  std::vector<double> omega;
  bool truncated = false; // |u| fell below the floor; series stops there

  std::size_t size() const { return gamma.size(); }
};

inline RateSeries rates_from_u(const UTrajectory& u, double rate_floor = 1e-8) {
  if (u.size() < 3) throw ConfigError("rates_from_u: need at least three samples");
  if (!(u.dt > 0.0)) throw ConfigError("rates_from_u: dt must be > 0");
  std::size_t n_ok = u.size();
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!(std::abs(u.values[n]) > rate_floor)) {
      n_ok = n;
      break;
    }
  }
  RateSeries out;
  out.dt = u.dt;
  out.truncated = n_ok < u.size();
  if (n_ok < 3) return out;
  // Increments of log u; principal branch assumes |Omega dt| < pi.
  std::vector<std::complex<double>> d(n_ok - 1);
  for (std::size_t n = 0; n + 1 < n_ok; ++n) d[n] = std::log(u.values[n + 1] / u.values[n]);
  out.gamma.resize(n_ok);
  out.omega.resize(n_ok);
  const double h2 = 2.0 * u.dt;
  for (std::size_t n = 0; n < n_ok; ++n) {
    std::complex<double> deriv;
    if (n == 0) {
      deriv = (3.0 * d[0] - d[1]) / h2;
    } else if (n + 1 == n_ok) {
      deriv = (3.0 * d[n - 1] - d[n - 2]) / h2;
    } else {
      deriv = (d[n - 1] + d[n]) / h2;
    }
    out.gamma[n] = -deriv.real();
    out.omega[n] = -deriv.imag();
  }
  return out;
}

} // namespace nmqed
