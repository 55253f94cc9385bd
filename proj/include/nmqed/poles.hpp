#pragma once

// Zeros of D(z) = z + i omega~ + mu~_ren(z): the resonance pole z = -i Omega - Gamma
// of the propagator transform, found by Newton iteration on the sheet reached
// by crossing the imaginary axis at z = -i omega~.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "nmqed/error.hpp"
#include "nmqed/fieldspec.hpp"
#include "nmqed/kernel_view.hpp"

namespace nmqed {

struct Pole {
  double Omega = 0.0;
  double Gamma = 0.0;
  cplx residue{0.0, 0.0};
  int iterations = 0;
  double residual = 0.0; // |D(z)| at the returned point

  cplx z() const { return {-Gamma, -Omega}; }
};

struct PoleOptions {
  int max_iterations = 100;
  double tolerance = 1e-12; // on |D(z)| / omega~
};

/// Both roots of the single-mode quadratic z^2 + i(w + k) z - w k + g^2 = 0,
/// lower frequency first.
inline std::pair<Pole, Pole> single_mode_poles(double g, double k, double omega_tilde) {
  const double s = std::sqrt((omega_tilde - k) * (omega_tilde - k) + 4.0 * g * g);
  auto make = [&](double omega) {
    Pole p;
    p.Omega = omega;
    const cplx z{0.0, -omega};
    const cplx d = z + cplx(0.0, k);
    p.residue = 1.0 / (1.0 - g * g / (d * d));
    const cplx D = z + cplx(0.0, omega_tilde) + g * g / d;
    p.residual = std::abs(D);
    return p;
  };
  return {make(0.5 * (omega_tilde + k - s)), make(0.5 * (omega_tilde + k + s))};
}

/// D(z) and D'(z) on the sheet selected by `crossing`.
inline std::pair<cplx, cplx> resonance_function(const FieldSpec& spec, const AtomSpec& atom, cplx z,
                                                std::optional<double> crossing) {
  const auto m = laplace_ren(spec, z, crossing);
  return {z + cplx(0.0, atom.omega_tilde) + m.value, 1.0 + m.derivative};
}

inline Pole find_pole(const FieldSpec& spec, const AtomSpec& atom, PoleOptions opt = {}) {
  spec.validate();
  atom.validate();
  const double w = atom.omega_tilde;
  if (spec.kind == FieldKind::SingleMode) {
    auto [lo, hi] = single_mode_poles(spec.g, spec.k, w);
    const double dlo = std::abs(lo.Omega - w), dhi = std::abs(hi.Omega - w);
    if (dlo < dhi) return lo;
    if (dhi < dlo) return hi;
    return std::abs(hi.residue) > std::abs(lo.residue) ? hi : lo;
  }
  for (double f : branch_frequencies(spec, 2.0 * w + 1.0)) {
    if (f == w) {
      throw DomainError("find_pole: omega~ = " + std::to_string(w) + " sits on a branch point");
    }
  }
  // Perturbative seed z = -i w - mu~_ren(-i w), the transform read on the physical side.
  const cplx on_axis{0.0, -w};
  cplx z = on_axis - laplace_ren(spec, on_axis, std::nullopt).value;
  auto [D, dD] = resonance_function(spec, atom, z, w);
  Pole out;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    if (std::abs(D) < opt.tolerance * w) {
      out.Omega = -z.imag();
      out.Gamma = -z.real();
      out.residue = 1.0 / dD;
      out.iterations = it;
      out.residual = std::abs(D);
      return out;
    }
    if (it == opt.max_iterations) break;
    const cplx step = -D / dD;
    // Backtrack while the step does not reduce |D|.
    double lambda = 1.0;
    for (int b = 0; b < 40; ++b) {
      const cplx trial = z + lambda * step;
      auto [Dt, dDt] = resonance_function(spec, atom, trial, w);
      if (std::abs(Dt) < std::abs(D) || b == 39) {
        z = trial;
        D = Dt;
        dD = dDt;
        break;
      }
      lambda *= 0.5;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "find_pole: Newton did not converge in " << opt.max_iterations
      << " iterations; last iterate z = " << z << ", |D| = " << std::abs(D);
  throw NumericalError(msg.str());
}

/// Winding number of D(z) around the rectangle [re_lo, re_hi] x [im_lo, im_hi]
/// on the physical sheet, i.e. the number of zeros inside.
inline int count_zeros_in_box(const FieldSpec& spec, const AtomSpec& atom, double re_lo, double re_hi,
                              double im_lo, double im_hi) {
  if (!(re_lo > 0.0)) throw DomainError("count_zeros_in_box: box must lie in Re z > 0");
  auto D = [&](cplx z) { return resonance_function(spec, atom, z, std::nullopt).first; };
  const cplx corners[5] = {{re_lo, im_lo}, {re_hi, im_lo}, {re_hi, im_hi}, {re_lo, im_hi}, {re_lo, im_lo}};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    // Adaptive steps keep each phase increment small.
    struct Seg {
      cplx a, b;
      cplx fa, fb;
      int depth;
    };
    std::vector<Seg> stack{{corners[e], corners[e + 1], D(corners[e]), D(corners[e + 1]), 0}};
    while (!stack.empty()) {
      Seg s = stack.back();
      stack.pop_back();
      const double dphi = std::arg(s.fb / s.fa);
      if (std::abs(dphi) < 0.25 || s.depth > 40) {
        total += dphi;
        continue;
      }
      const cplx m = 0.5 * (s.a + s.b);
      const cplx fm = D(m);
      stack.push_back({m, s.b, fm, s.fb, s.depth + 1});
      stack.push_back({s.a, m, s.fa, fm, s.depth + 1});
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

} // namespace nmqed
