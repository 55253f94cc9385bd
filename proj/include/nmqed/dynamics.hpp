#pragma once

// Reduced density matrix of the atom in the vacuum field,
//   rho = [[1 - x, y], [conj(y), x]]   (excited first),
// evolved exactly by u(t) or through the rate master equation
//   d(1 - x)/dt = -2 Gamma (1 - x),   dy/dt = -(Gamma + i Omega) y.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nmqed/error.hpp"
#include "nmqed/rates.hpp"
#include "nmqed/trajectory.hpp"

namespace nmqed {

inline constexpr double kPropagatorSlack = 1e-9;

struct QubitState {
  double x = 1.0;                    // ground population
  std::complex<double> y{0.0, 0.0};  // coherence rho_eg

  double excited() const { return 1.0 - x; }
  /// x (1 - x) - |y|^2, non-negative for a valid density matrix.
  double positivity_margin() const { return x * (1.0 - x) - std::norm(y); }

  void validate() const {
    if (!std::isfinite(x) || !std::isfinite(y.real()) || !std::isfinite(y.imag())) {
      throw ConfigError("qubit state: non-finite entries");
    }
    if (x < -1e-12 || x > 1.0 + 1e-12) throw ConfigError("qubit state: x must lie in [0, 1]");
    if (positivity_margin() < -1e-12) throw ConfigError("qubit state: |y|^2 exceeds x (1 - x)");
  }

  static QubitState excited_state() { return {0.0, 0.0}; }
  static QubitState ground_state() { return {1.0, 0.0}; }
};

struct StateDerivative {
  double dx = 0.0;
  std::complex<double> dy{0.0, 0.0};
};

inline void require_physical(std::complex<double> u, const char* who) {
  if (!(std::abs(u) <= 1.0 + kPropagatorSlack)) {
    throw UnphysicalPropagator(std::string(who) + ": |u| = " + std::to_string(std::abs(u)) +
                               " exceeds 1");
  }
}

/// rho_t from rho_0: excited population times |u|^2, coherence times u.
inline QubitState propagate(const QubitState& state0, std::complex<double> u) {
  require_physical(u, "propagate");
  // |u| via hypot is exact for unit phasors, where std::norm rounds below 1.
  const double a = std::abs(u);
  const double excited = a * a * state0.excited();
  return {1.0 - excited, u * state0.y};
}

/// P(1 -> 0, t) = 1 - |u|^2.
inline double emission_probability(std::complex<double> u) {
  require_physical(u, "emission_probability");
  const double a = std::abs(u);
  const double p = (1.0 - a) * (1.0 + a);
  // A stored unit phasor can sit an ulp or two below modulus 1; that is not emission.
  if (p <= 4.0 * std::numeric_limits<double>::epsilon()) return 0.0;
  return std::min(p, 1.0);
}

inline StateDerivative master_rhs(const QubitState& s, double Gamma, double Omega) {
  return {2.0 * Gamma * s.excited(), std::complex<double>(-Gamma, -Omega) * s.y};
}

/// Classical RK4 on master_rhs with rates sampled on the RateSeries grid and
/// interpolated linearly at half steps. Returns the state at every sample.
inline std::vector<QubitState> integrate_master(const QubitState& state0, const RateSeries& rates) {
  state0.validate();
  std::vector<QubitState> out;
  if (rates.size() == 0) return out;
  out.reserve(rates.size());
  out.push_back(state0);
  const double h = rates.dt;
  auto add = [](const QubitState& s, const StateDerivative& d, double f) {
    return QubitState{s.x + f * d.dx, s.y + f * d.dy};
  };
  for (std::size_t n = 0; n + 1 < rates.size(); ++n) {
    const double g0 = rates.gamma[n], g1 = rates.gamma[n + 1];
    const double w0 = rates.omega[n], w1 = rates.omega[n + 1];
    const double gm = 0.5 * (g0 + g1), wm = 0.5 * (w0 + w1);
    const QubitState& s = out.back();
    const auto k1 = master_rhs(s, g0, w0);
    const auto k2 = master_rhs(add(s, k1, 0.5 * h), gm, wm);
    const auto k3 = master_rhs(add(s, k2, 0.5 * h), gm, wm);
    const auto k4 = master_rhs(add(s, k3, h), g1, w1);
    QubitState next{s.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
                    s.y + h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy)};
    out.push_back(next);
  }
  return out;
}

struct RelaxationTimes {
  std::optional<double> T1; // first time |u|^2 <= 1/e
  std::optional<double> T2; // first time |u| <= 1/e

  bool converged() const { return T1.has_value() && T2.has_value(); }
};

namespace detail {

// First crossing of f_n <= level, linearly interpolated between samples.
template <class F>
std::optional<double> first_crossing(const UTrajectory& u, double level, F&& f) {
  if (u.size() == 0) return std::nullopt;
  double prev = f(u.values[0]);
  if (prev <= level) return 0.0;
  for (std::size_t n = 1; n < u.size(); ++n) {
    const double cur = f(u.values[n]);
    if (cur <= level) {
      const double frac = (prev - level) / (prev - cur);
      return u.time(n - 1) + frac * u.dt;
    }
    prev = cur;
  }
  return std::nullopt;
}

} // namespace detail

inline RelaxationTimes coherence_relaxation_times(const UTrajectory& u) {
  const double inv_e = std::exp(-1.0);
  RelaxationTimes out;
  out.T1 = detail::first_crossing(u, inv_e, [](std::complex<double> v) { return std::norm(v); });
  out.T2 = detail::first_crossing(u, inv_e, [](std::complex<double> v) { return std::abs(v); });
  return out;
}

} // namespace nmqed
