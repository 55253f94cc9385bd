#pragma once

// Complex special functions: exponential integrals E1/Ei, the continuous
// log-gamma and digamma, and the coth-weighted integral J(x, a) used to
// validate the cavity closed form.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "nmqed/error.hpp"
#include "nmqed/quadrature.hpp"

namespace nmqed::specfun {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = std::numbers::egamma;

namespace detail {

inline void require_finite(const cplx& w, const char* who) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw DomainError(std::string(who) + ": non-finite argument");
  }
}

// A zero imaginary part (of either sign) is read as the upper side of a cut.
inline cplx upper_side(cplx w) {
  if (w.imag() == 0.0) w.imag(0.0);
  return w;
}

// Near the negative real axis far out, where the continued fraction crawls.
// There e^w < 1e-19, so the Stokes term is invisible and the asymptotic
// series with optimal truncation is exact to rounding.
inline bool use_asymptotic(const cplx& w) {
  return w.real() < 0.0 && std::abs(w.imag()) < 0.5 * std::abs(w.real()) && std::abs(w) >= 50.0;
}

// sum_k (-1)^k k! / w^{k+1}, stopped at the smallest term.
inline cplx e1_scaled_asymptotic(const cplx& w) {
  const cplx inv = 1.0 / w;
  cplx term = inv;
  cplx sum = term;
  double last = std::abs(term);
  for (int k = 1; k < 200; ++k) {
    const cplx next = -term * static_cast<double>(k) * inv;
    const double size = std::abs(next);
    if (size >= last || size < 1e-17 * std::abs(sum)) break;
    term = next;
    sum += term;
    last = size;
  }
  return sum;
}

inline bool use_series(const cplx& w) {
  const double r = std::abs(w);
  if (r < 3.0) return true;
  return w.real() < 0.0 && std::abs(w.imag()) < 0.5 * std::abs(w.real()) && r < 50.0;
}

// Sum_{n>=1} (-w)^n / (n n!)
inline cplx e1_series_tail(const cplx& w) {
  cplx term = 1.0;
  cplx sum = 0.0;
  for (int n = 1; n < 500; ++n) {
    term *= -w / static_cast<double>(n);
    const cplx add = term / static_cast<double>(n);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz evaluation of 1 / (w + 1 - 1/(w + 3 - 4/(w + 5 - ...))) = e^w E1(w).
inline cplx e1_scaled_cf(const cplx& w) {
  constexpr double tiny = 1e-300;
  cplx f = w + 1.0;
  if (std::abs(f) < tiny) f = tiny;
  cplx c = f;
  cplx d = 0.0;
  for (int n = 1; n < 20000; ++n) {
    const double an = -static_cast<double>(n) * n;
    const cplx bn = w + (2.0 * n + 1.0);
    d = bn + an * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = bn + an / c;
    if (std::abs(c) < tiny) c = tiny;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return 1.0 / f;
  }
  throw NumericalError("expint_e1: continued fraction did not converge");
}

} // namespace detail

/// e^w E1(w) on the principal branch (cut along the negative real axis, a
/// zero imaginary part taken from above). Stays finite where e^{-w} would
/// over- or underflow.
inline cplx expint_e1_scaled(cplx w) {
  detail::require_finite(w, "expint_e1");
  if (w == cplx(0.0, 0.0)) throw DomainError("expint_e1: logarithmic singularity at w = 0");
  w = detail::upper_side(w);
  if (detail::use_series(w)) {
    const cplx e1 = -euler_gamma - std::log(w) - detail::e1_series_tail(w);
    return std::exp(w) * e1;
  }
  if (detail::use_asymptotic(w)) return detail::e1_scaled_asymptotic(w);
  return detail::e1_scaled_cf(w);
}

/// E1(w) = int_w^inf e^{-t}/t dt, principal branch.
inline cplx expint_e1(cplx w) {
  detail::require_finite(w, "expint_e1");
  if (w == cplx(0.0, 0.0)) throw DomainError("expint_e1: logarithmic singularity at w = 0");
  w = detail::upper_side(w);
  if (detail::use_series(w)) {
    return -euler_gamma - std::log(w) - detail::e1_series_tail(w);
  }
  if (detail::use_asymptotic(w)) {
    // The exponentially small imaginary jump of the cut still matters here.
    const cplx jump = w.imag() >= 0.0 ? cplx(0.0, -std::numbers::pi) : cplx(0.0, std::numbers::pi);
    return std::exp(-w) * detail::e1_scaled_asymptotic(w) + jump;
  }
  return std::exp(-w) * detail::e1_scaled_cf(w);
}

/// Exponential integral Ei continued to the complex plane with the principal
/// logarithm: Ei(w) = gamma + log w + sum w^n/(n n!).
inline cplx expint_ei(cplx w) {
  detail::require_finite(w, "expint_ei");
  if (w == cplx(0.0, 0.0)) throw DomainError("expint_ei: logarithmic singularity at w = 0");
  w = detail::upper_side(w);
  const cplx mw = detail::upper_side(-w);
  return -expint_e1(mw) + std::log(w) - std::log(mw);
}

namespace detail {

inline bool is_nonpositive_integer(const cplx& w) {
  return w.imag() == 0.0 && w.real() <= 0.0 && w.real() == std::floor(w.real());
}

// Bernoulli numbers B_2 .. B_16.
inline constexpr double kBernoulli[] = {1.0 / 6.0,     -1.0 / 30.0,   1.0 / 42.0, -1.0 / 30.0,
                                        5.0 / 66.0,    -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0};

inline constexpr double kShiftTarget = 12.0;

} // namespace detail

/// Continuous log-gamma: analytic off the negative real axis and equal to
/// log of Gamma only up to multiples of 2 pi i. Upward recurrence to
/// Re(w) >= 12, then the Stirling series.
inline cplx log_gamma(cplx w) {
  detail::require_finite(w, "log_gamma");
  if (detail::is_nonpositive_integer(w)) {
    throw DomainError("log_gamma: pole of Gamma at w = " + std::to_string(w.real()));
  }
  cplx shift_sum = 0.0;
  while (w.real() < detail::kShiftTarget) {
    shift_sum += std::log(w);
    w += 1.0;
  }
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx pw = inv;
  for (int k = 1; k <= 8; ++k) {
    series += detail::kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= inv2;
  }
  const cplx stirling =
      (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + series;
  return stirling - shift_sum;
}

/// Digamma psi(w) = d/dw log Gamma(w).
inline cplx digamma(cplx w) {
  detail::require_finite(w, "digamma");
  if (detail::is_nonpositive_integer(w)) {
    throw DomainError("digamma: pole at w = " + std::to_string(w.real()));
  }
  cplx shift_sum = 0.0;
  while (w.real() < detail::kShiftTarget) {
    shift_sum += 1.0 / w;
    w += 1.0;
  }
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx pw = inv2;
  for (int k = 1; k <= 8; ++k) {
    series += detail::kBernoulli[k - 1] / (2.0 * k) * pw;
    pw *= inv2;
  }
  return std::log(w) - 0.5 * inv - series - shift_sum;
}

/// J(x, a) = int_x^inf e^{-y}/y coth(a y) dy along the ray y = x (1 + s), s >= 0.
inline cplx coth_integral_J(cplx x, cplx a, quad::Tolerance tol = {1e-14, 1e-12, 20000}) {
  detail::require_finite(x, "coth_integral_J");
  detail::require_finite(a, "coth_integral_J");
  if (x.real() <= 0.0) throw DomainError("coth_integral_J: ray needs Re(x) > 0");
  if (a == cplx(0.0, 0.0)) throw DomainError("coth_integral_J: a = 0");
  // Poles of coth(a y) sit at y = i pi n / a, on the path iff x a / (i pi) is real.
  const cplx ratio = x * a / cplx(0.0, std::numbers::pi);
  if (std::abs(ratio.imag()) <= 1e-12 * std::abs(ratio)) {
    throw DomainError("coth_integral_J: a pole of coth(a y) lies on the integration ray");
  }
  auto integrand = [&](double s) -> cplx {
    const cplx y = x * (1.0 + s);
    const cplx ay = a * y;
    // coth z = (1 + e^{-2z}) / (1 - e^{-2z}), written for Re z >= 0
    const cplx z = ay.real() >= 0.0 ? ay : -ay;
    const cplx e = std::exp(-2.0 * z);
    cplx coth = (1.0 + e) / (1.0 - e);
    if (ay.real() < 0.0) coth = -coth;
    return std::exp(-y) * coth / (1.0 + s);
  };
  // |coth| along the path is bounded by the value at its start for our uses;
  // the tail bound only steers chunking.
  const double decay = x.real();
  const double scale = std::abs(integrand(0.0)) + 1.0;
  auto tail = [&](double s) { return scale * std::exp(-decay * s) / decay; };
  return quad::integrate_to_infinity<cplx>(integrand, 0.0, 1.0 / decay, tail, tol).value;
}

} // namespace nmqed::specfun
