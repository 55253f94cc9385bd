#pragma once

// u(t) = (1/2 pi i) int_{c - i inf}^{c + i inf} e^{zt} / D(z) dz,
//   D(z) = z + i omega~ + mu~_ren(z),
// on the line z = c + i y. The free part 1/(z + a) with a = i omega_0 + gamma
// is inverted exactly and subtracted, leaving an integrand that decays like
// 1/y^2. The remainder is split into panels, expanded in Legendre polynomials
// on each, and transformed exactly via
//   int_{-1}^{1} P_n(x) e^{i k x} dx = 2 i^n j_n(k).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "nmqed/error.hpp"
#include "nmqed/fieldspec.hpp"
#include "nmqed/kernel_view.hpp"
#include "nmqed/quadrature.hpp"
#include "nmqed/trajectory.hpp"

namespace nmqed {

struct BromwichOptions {
  double kappa = 1.0;        // contour abscissa c = kappa / t_max
  double panel_abs = 1e-12;  // accepted Legendre tail times panel width
  double panel_rel = 1e-9;   // or accepted tail relative to the panel mean
  double mass_floor = 1e-10; // or panels whose whole integral is below this
  double tail_tol = 1e-11;   // truncation bound of the far tails
  int max_depth = 60;        // bisection depth per initial panel
  double direct_limit = 2.0; // panels with half-width * t below this use the Gauss sum
};

namespace detail {

inline constexpr int kPanelOrder = 16;

/// Spherical Bessel j_0 .. j_{n-1} at x >= 0.
inline void spherical_bessel(double x, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  if (n == 0) return;
  if (x < 1e-3) {
    // Two-term series: j_k(x) = x^k/(2k+1)!! (1 - x^2/(2(2k+3))).
    double lead = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k > 0) lead *= x / (2.0 * k + 1.0);
      out[k] = lead * (1.0 - x * x / (2.0 * (2.0 * k + 3.0)));
    }
    return;
  }
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  if (x >= n) {
    // Upward recurrence is stable while k < x.
    out[0] = j0;
    if (n > 1) out[1] = j1;
    const double inv = 1.0 / x;
    for (int k = 1; k + 1 < n; ++k) out[k + 1] = (2.0 * k + 1.0) * inv * out[k] - out[k - 1];
    return;
  }
  // Miller: downward recurrence from well above n, normalized against j0 or j1.
  const int start = n + 20 + static_cast<int>(x);
  double hi = 0.0, cur = 1e-30;
  std::array<double, 2 * kPanelOrder + 24> tmp;
  if (start >= static_cast<int>(tmp.size())) throw NumericalError("spherical_bessel: order too high");
  tmp[start] = cur;
  const double inv = 1.0 / x;
  for (int k = start; k > 0; --k) {
    const double lo = (2.0 * k + 1.0) * inv * cur - hi;
    hi = cur;
    cur = lo;
    tmp[k - 1] = cur;
    if (std::abs(cur) > 1e250) {
      for (int q = k - 1; q <= start; ++q) tmp[q] *= 1e-250;
      cur *= 1e-250;
      hi *= 1e-250;
    }
  }
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / tmp[0] : j1 / tmp[1];
  for (int k = 0; k < n; ++k) out[k] = tmp[k] * scale;
}

struct Panel {
  double lo, hi;
  std::array<cplx, kPanelOrder> coef; // Legendre coefficients on [lo, hi]
  std::array<cplx, kPanelOrder> vals; // integrand at the Gauss nodes
  double tail;                        // |a_{n-2}| + |a_{n-1}|
};

class LegendreFit {
 public:
  LegendreFit() : rule_(kPanelOrder) {
    for (int i = 0; i < kPanelOrder; ++i) {
      std::array<double, kPanelOrder> p{};
      quad::legendre_values(rule_.nodes[i], p);
      for (int k = 0; k < kPanelOrder; ++k) {
        proj_[k][i] = (2.0 * k + 1.0) / 2.0 * rule_.weights[i] * p[k];
      }
    }
  }

  const quad::GaussLegendre& rule() const { return rule_; }

  template <class F>
  Panel fit(F&& f, double lo, double hi) const {
    Panel p{lo, hi, {}, {}, 0.0};
    auto& vals = p.vals;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < kPanelOrder; ++i) vals[i] = f(mid + half * rule_.nodes[i]);
    for (int k = 0; k < kPanelOrder; ++k) {
      cplx s = 0.0;
      for (int i = 0; i < kPanelOrder; ++i) s += proj_[k][i] * vals[i];
      p.coef[k] = s;
    }
    p.tail = std::abs(p.coef[kPanelOrder - 1]) + std::abs(p.coef[kPanelOrder - 2]);
    return p;
  }

 private:
  quad::GaussLegendre rule_;
  std::array<std::array<double, kPanelOrder>, kPanelOrder> proj_{};
};

/// int_lo^hi f(y) e^{iyt} dy from the panel's Legendre expansion.
inline cplx panel_transform(const Panel& p, double t, std::span<double> bessel) {
  const double half = 0.5 * (p.hi - p.lo);
  const double mid = 0.5 * (p.hi + p.lo);
  const double x = half * t;
  spherical_bessel(std::abs(x), bessel);
  // sum_n a_n i^n j_n(x), with j_n(-x) = (-1)^n j_n(x); plain real arithmetic
  // keeps this inner loop free of library complex multiplies.
  double re = 0.0, im = 0.0;
  for (int n = 0; n < kPanelOrder; n += 2) {
    const double even = (n % 4 == 0) ? bessel[n] : -bessel[n];
    double odd = (n % 4 == 0) ? bessel[n + 1] : -bessel[n + 1];
    if (x < 0.0) odd = -odd;
    re += p.coef[n].real() * even - p.coef[n + 1].imag() * odd;
    im += p.coef[n].imag() * even + p.coef[n + 1].real() * odd;
  }
  const double c = std::cos(mid * t), s = std::sin(mid * t);
  return {2.0 * half * (c * re - s * im), 2.0 * half * (c * im + s * re)};
}

} // namespace detail

/// Numerical inverse Laplace transform of 1/D(z) on a uniform time grid.
template <class Kernel>
UTrajectory invert_laplace_u(const Kernel& kernel, const AtomSpec& atom, const TimeGrid& grid,
                             BromwichOptions opt = {}) {
  validate_kernel(kernel);
  atom.validate();
  grid.validate();
  const double w = atom.omega_tilde;
  const double t_max = grid.last();
  const double c = t_max > 0.0 ? opt.kappa / t_max : w;
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("invert_laplace_u: contour must lie right of the imaginary axis");
  }
  const double w0 = bare_frequency(kernel, atom);
  const double gamma = w;
  const cplx a{gamma, w0};

  auto integrand = [&](double y) -> cplx {
    const cplx z{c, y};
    const cplx d = z + cplx(0.0, w) + laplace_ren(kernel, z).value;
    return 1.0 / d - 1.0 / (z + a);
  };

  // Breakpoints at every singular frequency y = -f and a core covering them.
  double f_max = std::max(w, w0);
  const auto feats = spectral_features(kernel, 50.0 * std::max(w, w0) + 1.0);
  for (double f : feats) f_max = std::max(f_max, f);
  const double scale = std::max({w, std::abs(w0), f_max});
  std::vector<double> bps{-f_max - 4.0 * scale, 4.0 * scale, 0.0, -w, -w0};
  for (double f : feats) bps.push_back(-f);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  // Initial panels graded geometrically toward each breakpoint, starting at c.
  std::vector<std::pair<double, double>> initial;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double lo = bps[i], hi = bps[i + 1];
    const double mid = 0.5 * (lo + hi);
    std::vector<double> cuts{lo, mid, hi};
    for (double s = c; lo + s < mid; s *= 4.0) {
      cuts.push_back(lo + s);
      cuts.push_back(hi - s);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) initial.emplace_back(cuts[k], cuts[k + 1]);
  }

  const detail::LegendreFit fitter;
  std::vector<detail::Panel> panels;
  double fit_error = 0.0;
  auto refine = [&](double lo, double hi) {
    struct Job {
      double lo, hi;
      int depth;
    };
    std::vector<Job> stack{{lo, hi, 0}};
    while (!stack.empty()) {
      const Job j = stack.back();
      stack.pop_back();
      auto p = fitter.fit(integrand, j.lo, j.hi);
      const double width = j.hi - j.lo;
      const double rel_floor = opt.panel_rel * std::abs(p.coef[0]);
      double peak = 0.0;
      for (const auto& v : p.vals) peak = std::max(peak, std::abs(v));
      const double mass = peak * width;
      if (p.tail * width <= opt.panel_abs || p.tail <= rel_floor || mass <= opt.mass_floor ||
          j.depth >= opt.max_depth) {
        fit_error += std::min(p.tail * width, mass);
        panels.push_back(p);
        continue;
      }
      const double mid = 0.5 * (j.lo + j.hi);
      stack.push_back({mid, j.hi, j.depth + 1});
      stack.push_back({j.lo, mid, j.depth + 1});
    }
  };
  for (const auto& [lo, hi] : initial) refine(lo, hi);

  // Geometric tails [Y, 2Y] until the remaining mass is negligible.
  double tail_bound = 0.0;
  for (int side : {-1, 1}) {
    double y0 = side > 0 ? bps.back() : bps.front();
    double len = std::max(std::abs(y0), 1.0);
    for (int k = 0;; ++k) {
      if (k > 200) throw NumericalError("invert_laplace_u: integrand tail does not decay");
      const double y1 = y0 + side * len;
      refine(std::min(y0, y1), std::max(y0, y1));
      // |integrand| ~ C/y^2 beyond: the rest integrates to |f(y1)| |y1|.
      const double rest = std::abs(integrand(y1)) * std::abs(y1);
      y0 = y1;
      len *= 2.0;
      if (rest * std::exp(c * t_max) / (2.0 * std::numbers::pi) < opt.tail_tol) {
        tail_bound += rest;
        break;
      }
    }
  }

  // Panel-outer accumulation. While the phase across a panel is small the
  // Gauss sum with rotating node phasors is exact to rounding; beyond that the
  // Legendre-Bessel transform takes over.
  std::vector<cplx> acc(grid.count, 0.0);
  std::array<double, detail::kPanelOrder> bessel{};
  const auto& rule = fitter.rule();
  for (const auto& p : panels) {
    const double half = 0.5 * (p.hi - p.lo);
    const double mid = 0.5 * (p.hi + p.lo);
    std::size_t n_direct = grid.count;
    if (half * grid.dt > 0.0) {
      const double lim = opt.direct_limit / (std::abs(half) * grid.dt);
      n_direct = lim < static_cast<double>(grid.count) ? static_cast<std::size_t>(lim) : grid.count;
    }
    std::array<double, detail::kPanelOrder> y, wre, wim, pre, pim, sre, sim;
    for (int i = 0; i < detail::kPanelOrder; ++i) {
      y[i] = mid + half * rule.nodes[i];
      wre[i] = half * rule.weights[i] * p.vals[i].real();
      wim[i] = half * rule.weights[i] * p.vals[i].imag();
      sre[i] = std::cos(y[i] * grid.dt);
      sim[i] = std::sin(y[i] * grid.dt);
    }
    for (std::size_t n = 0; n < n_direct; ++n) {
      if (n % 64 == 0) {
        const double t = grid.time(n);
        for (int i = 0; i < detail::kPanelOrder; ++i) {
          pre[i] = std::cos(y[i] * t);
          pim[i] = std::sin(y[i] * t);
        }
      }
      double re = 0.0, im = 0.0;
      for (int i = 0; i < detail::kPanelOrder; ++i) {
        re += wre[i] * pre[i] - wim[i] * pim[i];
        im += wre[i] * pim[i] + wim[i] * pre[i];
        const double r = pre[i] * sre[i] - pim[i] * sim[i];
        pim[i] = pre[i] * sim[i] + pim[i] * sre[i];
        pre[i] = r;
      }
      acc[n] += cplx(re, im);
    }
    for (std::size_t n = n_direct; n < grid.count; ++n) {
      acc[n] += detail::panel_transform(p, grid.time(n), bessel);
    }
  }

  UTrajectory out;
  out.dt = grid.dt;
  out.values.resize(grid.count);
  out.error.resize(grid.count);
  for (std::size_t n = 0; n < grid.count; ++n) {
    const double t = grid.time(n);
    const double amp = std::exp(c * t) / (2.0 * std::numbers::pi);
    out.values[n] = std::exp(-a * t) + amp * acc[n];
    out.error[n] = amp * (fit_error + tail_bound);
  }
  return out;
}

} // namespace nmqed
