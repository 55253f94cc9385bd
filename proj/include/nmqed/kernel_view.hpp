#pragma once

// Uniform access to the two kernel sources the solvers accept: an analytic
// FieldSpec and a finite ModeSet. Each provides the renormalized transform,
// the static shift, and exact per-cell moments of the rotating-frame kernel
//   K(tau) = mu(tau) e^{i omega~ tau}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nmqed/error.hpp"
#include "nmqed/fieldspec.hpp"
#include "nmqed/modeset.hpp"
#include "nmqed/quadrature.hpp"

namespace nmqed {

/// int_0^h r^p K(m h + r) dr for cells m = 0 .. count - 1.
struct CellMoments {
  std::vector<cplx> k0, k1, k2;

  explicit CellMoments(std::size_t count) : k0(count), k1(count), k2(count) {}
};

inline void validate_kernel(const FieldSpec& spec) { spec.validate(); }
inline void validate_kernel(const ModeSet& modes) { modes.validate(); }

inline cplx static_shift(const FieldSpec& spec) { return renormalization_shift(spec); }
inline cplx static_shift(const ModeSet&) { return 0.0; }

/// Bare splitting: the frequency the transform's 1/z tail rotates at.
inline double bare_frequency(const ModeSet&, const AtomSpec& atom) { return atom.omega_tilde; }

inline detail::LaplaceEval laplace_ren(const FieldSpec& spec, cplx z,
                                       std::optional<double> crossing = std::nullopt) {
  return detail::mu_tilde_ren(spec, z, crossing);
}

inline detail::LaplaceEval laplace_ren(const ModeSet& modes, cplx z,
                                       std::optional<double> = std::nullopt) {
  detail::LaplaceEval out{0.0, 0.0};
  for (const auto& m : modes.modes) {
    const cplx d = z + cplx(0.0, m.omega);
    if (d == cplx(0.0, 0.0)) {
      throw DomainError("mode set transform: pole at z = -i*" + std::to_string(m.omega));
    }
    const cplx r = m.g * m.g / d;
    out.value += r;
    out.derivative -= r / d;
  }
  return out;
}

/// Frequencies where the transform is singular on the imaginary axis.
inline std::vector<double> spectral_features(const FieldSpec& spec, double omega_max) {
  if (spec.kind == FieldKind::SingleMode) return {spec.k};
  return branch_frequencies(spec, omega_max);
}

inline std::vector<double> spectral_features(const ModeSet& modes, double) {
  std::vector<double> out;
  out.reserve(modes.size());
  for (const auto& m : modes.modes) out.push_back(m.omega);
  return out;
}

namespace detail {

// Adds the exact moments of g^2 e^{i alpha tau} to every cell.
inline void add_oscillator_moments(CellMoments& out, double g2, double alpha, double h) {
  const auto base = exp_moments(cplx(0.0, alpha * h));
  const cplx b0 = g2 * h * base.m0;
  const cplx b1 = g2 * h * h * base.m1;
  const cplx b2 = g2 * h * h * h * base.m2;
  const cplx step = std::exp(cplx(0.0, alpha * h));
  cplx phase = 1.0;
  const std::size_t count = out.k0.size();
  for (std::size_t m = 0; m < count; ++m) {
    // Resynchronize the running phase now and then to stop drift.
    if (m % 256 == 0) phase = std::exp(cplx(0.0, alpha * h * static_cast<double>(m)));
    out.k0[m] += b0 * phase;
    out.k1[m] += b1 * phase;
    out.k2[m] += b2 * phase;
    phase *= step;
  }
}

} // namespace detail

inline CellMoments cell_moments(const ModeSet& modes, double omega_tilde, double h, std::size_t count) {
  CellMoments out(count);
  for (const auto& m : modes.modes) {
    detail::add_oscillator_moments(out, m.g * m.g, omega_tilde - m.omega, h);
  }
  return out;
}

inline CellMoments cell_moments(const FieldSpec& spec, double omega_tilde, double h, std::size_t count) {
  if (spec.kind == FieldKind::SingleMode) {
    CellMoments out(count);
    detail::add_oscillator_moments(out, spec.g * spec.g, omega_tilde - spec.k, h);
    return out;
  }
  CellMoments out(count);
  const double horizon = h * static_cast<double>(count);
  const auto peaks = kernel_peaks(spec, horizon);
  quad::Tolerance tol{1e-18, 1e-13, 400};
  std::size_t next_peak = 0;
  for (std::size_t m = 0; m < count; ++m) {
    const double a = h * static_cast<double>(m);
    auto f = [&](double r) -> std::array<cplx, 3> {
      const double tau = a + r;
      const cplx k = kernel_mu(spec, tau) * std::exp(cplx(0.0, omega_tilde * tau));
      return {k, r * k, r * r * k};
    };
    std::vector<double> pts{0.0};
    while (next_peak < peaks.size() && peaks[next_peak] < a) ++next_peak;
    for (std::size_t p = next_peak; p < peaks.size() && peaks[p] < a + h; ++p) {
      if (peaks[p] > a) pts.push_back(peaks[p] - a);
    }
    pts.push_back(h);
    const auto est = quad::integrate_pieces<std::array<cplx, 3>>(f, pts, tol);
    out.k0[m] = est.value[0];
    out.k1[m] = est.value[1];
    out.k2[m] = est.value[2];
  }
  return out;
}

} // namespace nmqed
