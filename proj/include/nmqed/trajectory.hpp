#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "nmqed/error.hpp"

namespace nmqed {

/// Uniform time grid t_n = n * dt, n = 0 .. count - 1.
struct TimeGrid {
  double dt = 0.0;
  std::size_t count = 0;

  double time(std::size_t n) const { return static_cast<double>(n) * dt; }
  double last() const { return count == 0 ? 0.0 : time(count - 1); }

  void validate() const {
    if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("time grid: dt must be finite and > 0");
    if (count == 0) throw ConfigError("time grid: needs at least one point");
  }
};

/// u(t_n) sampled on a uniform grid starting at t = 0.
struct UTrajectory {
  double dt = 0.0;
  std::vector<std::complex<double>> values;
  std::vector<double> error; // per-point error estimate, empty when unavailable

  std::size_t size() const { return values.size(); }
  double time(std::size_t n) const { return static_cast<double>(n) * dt; }
  TimeGrid grid() const { return {dt, values.size()}; }

  double max_modulus() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// max_n |a(t_n) - b(t_n)| over the times both trajectories share, for
/// grids whose steps are integer multiples of each other.
inline double max_deviation(const UTrajectory& a, const UTrajectory& b, double t_max) {
  const UTrajectory& fine = a.dt <= b.dt ? a : b;
  const UTrajectory& coarse = a.dt <= b.dt ? b : a;
  const double ratio = coarse.dt / fine.dt;
  const auto stride = static_cast<std::size_t>(std::llround(ratio));
  if (stride == 0 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
    throw ConfigError("max_deviation: time steps are not integer multiples");
  }
  double worst = 0.0;
  for (std::size_t n = 0; n < coarse.size(); ++n) {
    if (coarse.time(n) > t_max * (1.0 + 1e-12)) break;
    const std::size_t m = n * stride;
    if (m >= fine.size()) break;
    worst = std::max(worst, std::abs(coarse.values[n] - fine.values[m]));
  }
  return worst;
}

} // namespace nmqed
