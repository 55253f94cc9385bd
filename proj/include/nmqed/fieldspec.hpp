#pragma once

// Field environments of a two-level atom and their memory kernels.
//
// Units: hbar = c = 1. Every continuum kernel is written through a spectral
// density rho(k) >= 0,  mu(s) = int rho(k) e^{-iks} dk,  so that
//   mu~(z) = int_0^inf mu(s) e^{-zs} ds = int rho(k) / (z + ik) dk.
// The atom enters only through its renormalized splitting omega~; the static
// shift c = mu~ at large-but-cut-off scale is split off as `renormalization_shift`
// and never appears in the dynamics.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmqed/error.hpp"
#include "nmqed/specfun.hpp"

namespace nmqed {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

enum class FieldKind { SingleMode, FreeSpace, Band, Cavity };

inline std::string_view to_string(FieldKind kind) {
  switch (kind) {
  case FieldKind::SingleMode: return "single_mode";
  case FieldKind::FreeSpace: return "free_space";
  case FieldKind::Band: return "band";
  case FieldKind::Cavity: return "cavity";
  }
  return "unknown";
}

struct FieldSpec {
  FieldKind kind = FieldKind::SingleMode;
  double g = 0.0;        // single-mode coupling
  double k = 0.0;        // single-mode frequency
  double lambda2 = 0.0;  // continuum coupling lambda^2
  double epsilon = 0.0;  // UV cutoff time (free space, cavity)
  double omega1 = 0.0;   // band edges
  double omega2 = 0.0;
  double cavity_L = 0.0; // plate separation

  static FieldSpec single_mode(double g, double k) {
    FieldSpec s;
    s.kind = FieldKind::SingleMode;
    s.g = g;
    s.k = k;
    return s;
  }
  static FieldSpec free_space(double lambda2, double epsilon) {
    FieldSpec s;
    s.kind = FieldKind::FreeSpace;
    s.lambda2 = lambda2;
    s.epsilon = epsilon;
    return s;
  }
  static FieldSpec band(double lambda2, double omega1, double omega2) {
    FieldSpec s;
    s.kind = FieldKind::Band;
    s.lambda2 = lambda2;
    s.omega1 = omega1;
    s.omega2 = omega2;
    return s;
  }
  static FieldSpec cavity(double lambda2, double L, double epsilon) {
    FieldSpec s;
    s.kind = FieldKind::Cavity;
    s.lambda2 = lambda2;
    s.cavity_L = L;
    s.epsilon = epsilon;
    return s;
  }

  bool is_continuum() const { return kind != FieldKind::SingleMode; }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(finite(g) && finite(k) && finite(lambda2) && finite(epsilon) && finite(omega1) &&
          finite(omega2) && finite(cavity_L))) {
      throw ConfigError("field: non-finite parameter");
    }
    auto unused = [&](double v, const char* name) {
      if (v != 0.0) {
        throw ConfigError(std::string("field: '") + name + "' is not a parameter of kind " +
                          std::string(to_string(kind)));
      }
    };
    switch (kind) {
    case FieldKind::SingleMode:
      if (g < 0.0) throw ConfigError("field: single-mode coupling g must be >= 0");
      if (!(k > 0.0)) throw ConfigError("field: single-mode frequency k must be > 0");
      unused(lambda2, "lambda2");
      unused(epsilon, "epsilon");
      unused(omega1, "omega1");
      unused(omega2, "omega2");
      unused(cavity_L, "cavity_L");
      break;
    case FieldKind::FreeSpace:
      if (lambda2 < 0.0) throw ConfigError("field: lambda2 must be >= 0");
      if (!(epsilon > 0.0)) throw ConfigError("field: free space needs a cutoff epsilon > 0");
      unused(g, "g");
      unused(k, "k");
      unused(omega1, "omega1");
      unused(omega2, "omega2");
      unused(cavity_L, "cavity_L");
      break;
    case FieldKind::Band:
      if (lambda2 < 0.0) throw ConfigError("field: lambda2 must be >= 0");
      if (omega1 < 0.0 || !(omega1 < omega2)) {
        throw ConfigError("field: band edges need 0 <= omega1 < omega2");
      }
      unused(g, "g");
      unused(k, "k");
      unused(epsilon, "epsilon");
      unused(cavity_L, "cavity_L");
      break;
    case FieldKind::Cavity:
      if (lambda2 < 0.0) throw ConfigError("field: lambda2 must be >= 0");
      if (!(epsilon > 0.0)) throw ConfigError("field: cavity needs a cutoff epsilon > 0");
      if (!(cavity_L > 0.0)) throw ConfigError("field: cavity plate separation L must be > 0");
      unused(g, "g");
      unused(k, "k");
      unused(omega1, "omega1");
      unused(omega2, "omega2");
      break;
    }
  }
};

struct AtomSpec {
  double omega_tilde = 1.0; // renormalized splitting

  void validate() const {
    if (!(std::isfinite(omega_tilde) && omega_tilde > 0.0)) {
      throw ConfigError("atom: omega_tilde must be finite and > 0");
    }
  }
};

/// g_k = sqrt(lambda^2 / omega_k) for the continuum kinds.
inline double coupling_g(const FieldSpec& spec, double omega_k) {
  if (!spec.is_continuum()) throw ConfigError("coupling_g: single-mode spec has no lambda");
  if (!(omega_k > 0.0)) throw DomainError("coupling_g: omega_k must be > 0");
  return std::sqrt(spec.lambda2 / omega_k);
}

namespace detail {

/// m_p(x) = int_0^1 t^p e^{x t} dt for p = 0, 1, 2.
struct ExpMoments {
  cplx m0, m1, m2;
};

inline ExpMoments exp_moments(cplx x) {
  if (std::abs(x) < 0.5) {
    ExpMoments r{0.0, 0.0, 0.0};
    cplx term = 1.0; // x^n / n!
    for (int n = 0; n < 40; ++n) {
      r.m0 += term / (n + 1.0);
      r.m1 += term / (n + 2.0);
      r.m2 += term / (n + 3.0);
      term *= x / (n + 1.0);
      if (std::abs(term) < 1e-18) break;
    }
    return r;
  }
  const cplx ex = std::exp(x);
  const cplx m0 = (ex - 1.0) / x;
  const cplx m1 = (ex - m0) / x;
  const cplx m2 = (ex - 2.0 * m1) / x;
  return {m0, m1, m2};
}

/// (lambda^2/pi^2) int_{w1}^{w2} k e^{-iks} dk, valid for any real s.
inline cplx band_kernel(double lambda2, double w1, double w2, double s) {
  const double width = w2 - w1;
  const auto m = exp_moments(cplx(0.0, -width * s));
  return lambda2 / (pi * pi) * width * std::exp(cplx(0.0, -w1 * s)) * (w1 * m.m0 + width * m.m1);
}

/// 1 - e^{x}, accurate for small |x|.
inline cplx one_minus_exp(cplx x) {
  if (std::abs(x) < 1e-3) return -(x + x * x / 2.0 + x * x * x / 6.0 + x * x * x * x / 24.0);
  return 1.0 - std::exp(x);
}

inline cplx cavity_kernel(double lambda2, double L, double eps, double s) {
  // (1 + q)/(1 - q) with q = exp(-i (pi/L)(s - i eps)) is 2L-periodic in s.
  const double s_red = std::remainder(s, 2.0 * L);
  const cplx x{-pi * eps / L, -pi * s_red / L};
  const cplx q = std::exp(x);
  const cplx ratio = (1.0 + q) / one_minus_exp(x);
  return lambda2 / (2.0 * pi * L) / cplx(eps, s) * ratio;
}

/// Binet remainder J(b) = log Gamma(b) - (b - 1/2) log b + b - log(2 pi)/2 and
/// its derivative. A zero imaginary part keeps its sign to select the side of
/// the cut along the negative real axis.
struct Binet {
  cplx value, derivative;
};

inline Binet binet(cplx b) {
  using specfun::log_gamma;
  using specfun::digamma;
  if (specfun::detail::is_nonpositive_integer(b)) {
    throw DomainError("binet: branch point at b = " + std::to_string(b.real()));
  }
  if (b.real() >= 12.0 || (b.real() >= 0.0 && std::abs(b) >= 15.0)) {
    const cplx inv = 1.0 / b;
    const cplx inv2 = inv * inv;
    cplx val = 0.0, der = 0.0;
    cplx pw = inv; // b^{-(2k-1)}
    for (int k = 1; k <= 8; ++k) {
      const double bk = specfun::detail::kBernoulli[k - 1];
      val += bk / (2.0 * k * (2.0 * k - 1.0)) * pw;
      der -= bk / (2.0 * k) * pw * inv;
      pw *= inv2;
    }
    return {val, der};
  }
  if (b.real() < 0.0 && std::abs(b) >= 12.0) {
    // J(b) + J(-b) = -log(1 - e^{2 pi i b sigma}), sigma = sign of Im b.
    const bool upper = !std::signbit(b.imag());
    const cplx phase = upper ? cplx(0.0, 2.0 * pi) * b : cplx(0.0, -2.0 * pi) * b;
    const cplx e = std::exp(phase);
    const cplx dphase = upper ? cplx(0.0, 2.0 * pi) : cplx(0.0, -2.0 * pi);
    const Binet mirror = binet(-b);
    const cplx val = -std::log(1.0 - e) - mirror.value;
    const cplx der = dphase * e / (1.0 - e) + mirror.derivative;
    return {val, der};
  }
  const cplx lb = std::log(b);
  const cplx val = log_gamma(b) - (b - 0.5) * lb + b - 0.5 * std::log(2.0 * pi);
  const cplx der = digamma(b) - lb + 0.5 / b;
  return {val, der};
}

struct LaplaceEval {
  cplx value;      // renormalized mu~(z)
  cplx derivative; // d/dz of the same
};

/// Sheet selection for z with Re z < 0: the sheet reached from Re z > 0 by
/// crossing the imaginary axis at z = -i * crossing. Without a crossing the
/// principal branch (physical sheet) is used everywhere; on Re z = 0 the
/// physical value is the limit from the right.
inline LaplaceEval mu_tilde_ren(const FieldSpec& spec, cplx z, std::optional<double> crossing) {
  const bool continued = crossing.has_value() && z.real() < 0.0;
  const double lam = spec.lambda2 / (pi * pi);
  switch (spec.kind) {
  case FieldKind::SingleMode: {
    const cplx d = z + I * spec.k;
    if (std::abs(d) <= 1e-14 * (std::abs(z) + spec.k)) {
      throw DomainError("kernel_mu_laplace: pole of the single-mode transform at z = -i*" +
                        std::to_string(spec.k));
    }
    const double g2 = spec.g * spec.g;
    return {g2 / d, -g2 / (d * d)};
  }
  case FieldKind::FreeSpace:
  case FieldKind::Cavity: {
    LaplaceEval out{0.0, 0.0};
    if (z != cplx(0.0, 0.0)) {
      cplx w = -I * spec.epsilon * z;
      cplx f;
      if (w.imag() == 0.0 && w.real() < 0.0 && !continued) {
        // On the cut, from the physical (lower-w) side.
        f = std::conj(specfun::expint_e1_scaled(cplx(w.real(), 0.0)));
      } else {
        f = specfun::expint_e1_scaled(w);
        if (continued && z.imag() < 0.0) f += cplx(0.0, 2.0 * pi) * std::exp(w);
      }
      out.value = lam * z * f;
      out.derivative = lam * (f + z * (-I * spec.epsilon) * (f - 1.0 / w));
    }
    if (spec.kind == FieldKind::Cavity) {
      const double L = spec.cavity_L;
      cplx b = -I * L * z / pi;
      if (z.real() == 0.0) b.imag(-0.0); // physical side of the cut
      if (b.imag() == 0.0 && b.real() <= 0.0 && b.real() == std::round(b.real())) {
        throw DomainError("kernel_mu_laplace: cavity branch point at z = -i*" +
                          std::to_string(-b.real()) + "*pi/L");
      }
      Binet j = binet(b);
      if (continued && z.imag() < 0.0) {
        const double x = L * *crossing / pi;
        if (x == std::floor(x)) {
          throw DomainError("kernel_mu_laplace: sheet crossing at a cavity branch point");
        }
        // Number of Gamma-function branch points b = 0, -1, ... passed at the crossing.
        const double m = std::floor(x) + 1.0;
        j.value += cplx(0.0, 2.0 * pi) * (m + b - 0.5);
        j.derivative += cplx(0.0, 2.0 * pi);
      }
      out.value += -I * spec.lambda2 / (pi * L) * j.value;
      out.derivative += -spec.lambda2 / (pi * pi) * j.derivative;
    }
    return out;
  }
  case FieldKind::Band: {
    const cplx num = z + I * spec.omega2;
    const cplx den = z + I * spec.omega1;
    if (std::abs(num) == 0.0 || std::abs(den) == 0.0) {
      throw DomainError("kernel_mu_laplace: band-edge branch point");
    }
    const double y = -z.imag();
    const bool on_segment = y > spec.omega1 && y < spec.omega2;
    cplx ell;
    if (z.real() == 0.0 && on_segment) {
      ell = cplx(std::log(std::abs(num) / std::abs(den)), pi);
    } else {
      ell = std::log(num / den);
      const bool crosses_band = continued && z.imag() < 0.0 && *crossing > spec.omega1 &&
                                *crossing < spec.omega2;
      if (crosses_band) ell += cplx(0.0, 2.0 * pi);
    }
    return {lam * z * ell, lam * (ell + z * (1.0 / num - 1.0 / den))};
  }
  }
  throw ConfigError("kernel_mu_laplace: unknown field kind");
}

} // namespace detail

/// Static shift split off the transform: mu~(z) = renormalization_shift + mu~_ren(z).
inline cplx renormalization_shift(const FieldSpec& spec) {
  switch (spec.kind) {
  case FieldKind::SingleMode: return 0.0;
  case FieldKind::FreeSpace:
  case FieldKind::Cavity: return -I * spec.lambda2 / (pi * pi * spec.epsilon);
  case FieldKind::Band: return -I * spec.lambda2 * (spec.omega2 - spec.omega1) / (pi * pi);
  }
  throw ConfigError("renormalization_shift: unknown field kind");
}

/// Bare splitting omega_0 with i omega_0 + mu~ = i omega~ + mu~_ren.
inline double bare_frequency(const FieldSpec& spec, const AtomSpec& atom) {
  return atom.omega_tilde + (I * renormalization_shift(spec)).real();
}

/// Memory kernel mu(s), s >= 0.
inline cplx kernel_mu(const FieldSpec& spec, double s) {
  spec.validate();
  if (!(s >= 0.0)) throw DomainError("kernel_mu: s must be >= 0");
  switch (spec.kind) {
  case FieldKind::SingleMode: return spec.g * spec.g * std::exp(cplx(0.0, -spec.k * s));
  case FieldKind::FreeSpace: {
    const cplx d{s, -spec.epsilon};
    return -spec.lambda2 / (pi * pi) / (d * d);
  }
  case FieldKind::Band: return detail::band_kernel(spec.lambda2, spec.omega1, spec.omega2, s);
  case FieldKind::Cavity:
    return detail::cavity_kernel(spec.lambda2, spec.cavity_L, spec.epsilon, s);
  }
  throw ConfigError("kernel_mu: unknown field kind");
}

/// Laplace transform mu~(z) on the physical sheet (full, not renormalized).
inline cplx kernel_mu_laplace(const FieldSpec& spec, cplx z) {
  spec.validate();
  return renormalization_shift(spec) + detail::mu_tilde_ren(spec, z, std::nullopt).value;
}

/// mu~(z) with the static shift removed; the solvers work with this and omega~.
inline cplx kernel_mu_laplace_renormalized(const FieldSpec& spec, cplx z) {
  spec.validate();
  return detail::mu_tilde_ren(spec, z, std::nullopt).value;
}

/// Renormalized mu~ continued into Re z < 0 across the imaginary axis at
/// z = -i * crossing (second sheet, where resonance poles live).
inline cplx kernel_mu_laplace_continued(const FieldSpec& spec, cplx z, double crossing) {
  spec.validate();
  return detail::mu_tilde_ren(spec, z, crossing).value;
}

/// Spectral density rho(omega) of the continuum kinds (cutoff included).
inline double spectral_density(const FieldSpec& spec, double omega) {
  if (omega < 0.0) return 0.0;
  const double lam = spec.lambda2 / (pi * pi);
  switch (spec.kind) {
  case FieldKind::SingleMode: throw ConfigError("spectral_density: single mode is discrete");
  case FieldKind::FreeSpace: return lam * omega * std::exp(-omega * spec.epsilon);
  case FieldKind::Band: return (omega >= spec.omega1 && omega <= spec.omega2) ? lam * omega : 0.0;
  case FieldKind::Cavity: {
    const double n = std::floor(omega * spec.cavity_L / pi);
    return spec.lambda2 / (2.0 * pi * spec.cavity_L) * (2.0 * n + 1.0) *
           std::exp(-omega * spec.epsilon);
  }
  }
  return 0.0;
}

/// Times s in [0, horizon] around which the kernel is sharply peaked.
inline std::vector<double> kernel_peaks(const FieldSpec& spec, double horizon) {
  std::vector<double> peaks;
  if (spec.kind == FieldKind::FreeSpace) peaks.push_back(0.0);
  if (spec.kind == FieldKind::Cavity) {
    for (double s = 0.0; s <= horizon; s += 2.0 * spec.cavity_L) peaks.push_back(s);
  }
  return peaks;
}

/// Frequencies omega >= 0 where mu~ has branch points at z = -i omega, up to omega_max.
inline std::vector<double> branch_frequencies(const FieldSpec& spec, double omega_max) {
  std::vector<double> out;
  switch (spec.kind) {
  case FieldKind::SingleMode: break;
  case FieldKind::FreeSpace: out.push_back(0.0); break;
  case FieldKind::Band:
    out.push_back(spec.omega1);
    out.push_back(spec.omega2);
    break;
  case FieldKind::Cavity:
    for (int n = 0; n * pi / spec.cavity_L <= omega_max; ++n) out.push_back(n * pi / spec.cavity_L);
    break;
  }
  return out;
}

} // namespace nmqed
