#pragma once

// Adaptive Gauss-Kronrod quadrature for real, complex and small-vector valued
// integrands, plus Gauss-Legendre rules used by the Filon-type transforms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "nmqed/error.hpp"

namespace nmqed::quad {

using cplx = std::complex<double>;

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const std::array<cplx, N>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class V>
V zero_like() {
  if constexpr (std::is_arithmetic_v<V>) {
    return V{0};
  } else {
    return V{};
  }
}

template <std::size_t N>
std::array<cplx, N>& operator+=(std::array<cplx, N>& a, const std::array<cplx, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}
template <std::size_t N>
std::array<cplx, N> operator+(std::array<cplx, N> a, const std::array<cplx, N>& b) {
  return a += b;
}
template <std::size_t N>
std::array<cplx, N> operator-(std::array<cplx, N> a, const std::array<cplx, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}
template <std::size_t N>
std::array<cplx, N> operator*(double s, std::array<cplx, N> a) {
  for (auto& x : a) x *= s;
  return a;
}

template <class V>
struct Estimate {
  V value;
  double error;
};

namespace detail {
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
} // namespace detail

/// 15-point Kronrod rule with embedded 7-point Gauss error estimate.
template <class V, class F>
Estimate<V> gauss_kronrod_15(F&& f, double a, double b) {
  using namespace detail;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  V fc = f(center);
  V kronrod = kWgk[7] * fc;
  V gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    V f1 = f(center - dx);
    V f2 = f(center + dx);
    V sum = f1 + f2;
    kronrod = kronrod + kWgk[j] * sum;
    if (j % 2 == 1) gauss = gauss + kWg[j / 2] * sum;
  }
  V value = half * kronrod;
  const double err = magnitude(half * (kronrod - gauss));
  return {value, err};
}

struct Tolerance {
  double abs = 1e-13;
  double rel = 1e-12;
  int max_intervals = 4000;
};

/// Globally adaptive bisection on [a, b] (QAG-style, largest error first).
template <class V, class F>
Estimate<V> integrate(F&& f, double a, double b, Tolerance tol = {}) {
  struct Piece {
    double a, b;
    Estimate<V> est;
    bool operator<(const Piece& o) const { return est.error < o.est.error; }
  };
  if (a == b) return {zero_like<V>(), 0.0};
  std::priority_queue<Piece> heap;
  auto first = gauss_kronrod_15<V>(f, a, b);
  V total = first.value;
  double total_err = first.error;
  heap.push({a, b, first});
  int count = 1;
  while (total_err > std::max(tol.abs, tol.rel * magnitude(total))) {
    if (count >= tol.max_intervals) break;
    Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break; // interval exhausted
    heap.pop();
    auto left = gauss_kronrod_15<V>(f, worst.a, mid);
    auto right = gauss_kronrod_15<V>(f, mid, worst.b);
    total = total - worst.est.value + left.value + right.value;
    total_err += left.error + right.error - worst.est.error;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
    count += 1;
  }
  // Re-sum to drop the rounding accumulated by the running updates.
  V sum = zero_like<V>();
  double err = 0.0;
  while (!heap.empty()) {
    sum = sum + heap.top().est.value;
    err += heap.top().est.error;
    heap.pop();
  }
  return {sum, err};
}

/// Integrate over consecutive intervals of `points` (sorted), each adaptively.
template <class V, class F>
Estimate<V> integrate_pieces(F&& f, std::span<const double> points, Tolerance tol = {}) {
  V sum = zero_like<V>();
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    auto e = integrate<V>(f, points[i], points[i + 1], tol);
    sum = sum + e.value;
    err += e.error;
  }
  return {sum, err};
}

/// Integral over [a, inf) by consecutive adaptive chunks of geometrically
/// growing length; stops once `tail_bound(x)` (an upper bound on the remaining
/// integral from x) falls below the absolute tolerance.
template <class V, class F, class Tail>
Estimate<V> integrate_to_infinity(F&& f, double a, double first_chunk, Tail&& tail_bound,
                                  Tolerance tol = {}) {
  V sum = zero_like<V>();
  double err = 0.0;
  double x = a;
  double len = first_chunk;
  for (int i = 0; i < 200; ++i) {
    auto e = integrate<V>(f, x, x + len, tol);
    sum = sum + e.value;
    err += e.error;
    x += len;
    len *= 1.5;
    if (tail_bound(x) < tol.abs) return {sum, err};
  }
  throw NumericalError("integrate_to_infinity: tail did not decay within 200 chunks");
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[n - 1 - i] = x;
      weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

/// Legendre polynomials P_0..P_{n-1} at x.
inline void legendre_values(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = x;
  for (std::size_t k = 2; k < out.size(); ++k) {
    out[k] = ((2.0 * k - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
  }
}

} // namespace nmqed::quad
