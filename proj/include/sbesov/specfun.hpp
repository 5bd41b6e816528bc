#pragma once

// Special functions: integer-order Bessel J_n, its positive zeros,
// Gauss-Legendre rules on (0,1) and the Beta function.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sbesov/errors.hpp"

namespace sbesov {

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, in (0,1)
  std::vector<double> weights;  // positive, summing to 1
  int order() const { return static_cast<int>(nodes.size()); }
};

inline constexpr int kBesselMaxOrder = 256;
inline constexpr double kBesselMaxArgument = 1.0e4;

namespace detail {

inline void check_bessel_args(int n, double x) {
  if (n < 0 || n > kBesselMaxOrder) {
    throw ArgumentError("bessel order " + std::to_string(n) + " outside [0, 256]");
  }
  if (!(x >= 0.0) || x > kBesselMaxArgument) {
    throw ArgumentError("bessel argument " + std::to_string(x) + " outside [0, 1e4]");
  }
}

// The power series loses about log10(I_n(x)/|J_n(x)|) digits to cancellation,
// so it is only used where that loss stays below ~3 digits.
inline bool use_series(int n, double x) { return x <= 8.0 || x * x <= 4.0 * (n + 1); }

inline double bessel_series(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  double lead = 1.0;
  for (int i = 1; i <= n; ++i) lead *= half / i;
  if (lead == 0.0) return 0.0;
  const double q = half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= -q / (static_cast<double>(k) * (n + k));
    sum += term;
    if (k * k > q && std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

// Miller's downward recurrence from an order well above max(n_hi, x),
// normalized with J_0 + 2 sum_k J_2k = 1. Writes J_0..J_{n_hi} into out.
inline void bessel_miller(int n_hi, double x, std::span<double> out) {
  constexpr double kBig = 1e250;
  constexpr double kRescale = 1e-250;
  int start = std::max(n_hi, static_cast<int>(std::ceil(x))) + 50 +
              static_cast<int>(20.0 * std::cbrt(x));
  start += start % 2;
  double f_up = 0.0;
  double f = 1e-30;
  double sum = 0.0;
  for (int m = start; m >= 1; --m) {
    if (m <= n_hi) out[m] = f;
    if (m % 2 == 0) sum += 2.0 * f;
    const double f_down = (2.0 * m / x) * f - f_up;
    f_up = f;
    f = f_down;
    if (std::abs(f) > kBig) {
      f *= kRescale;
      f_up *= kRescale;
      sum *= kRescale;
      for (int i = m; i <= n_hi; ++i) out[i] *= kRescale;
    }
  }
  out[0] = f;
  sum += f;
  for (int i = 0; i <= n_hi; ++i) out[i] /= sum;
}

}  // namespace detail

/// J_n(x) for integer 0 <= n <= 256 and 0 <= x <= 1e4; absolute error below 1e-12.
inline double bessel_j(int n, double x) {
  detail::check_bessel_args(n, x);
  if (detail::use_series(n, x)) return detail::bessel_series(n, x);
  std::vector<double> buf(static_cast<std::size_t>(n) + 1);
  detail::bessel_miller(n, x, buf);
  return buf[static_cast<std::size_t>(n)];
}

/// Fills out[i] = J_{lo+i}(x) for lo..hi. Negative orders use J_{-m} = (-1)^m J_m.
/// One Miller sweep serves the whole range, which is what the radial tables need.
inline void bessel_j_range(int lo, int hi, double x, std::span<double> out) {
  const int top = std::max(std::abs(lo), std::abs(hi));
  detail::check_bessel_args(top, x);
  const int bottom = (lo <= 0 && hi >= 0) ? 0 : std::min(std::abs(lo), std::abs(hi));
  auto signed_value = [](int m, double v) { return (m < 0 && (-m) % 2 == 1) ? -v : v; };
  if (detail::use_series(bottom, x)) {
    for (int m = lo; m <= hi; ++m) {
      out[static_cast<std::size_t>(m - lo)] = signed_value(m, detail::bessel_series(std::abs(m), x));
    }
    return;
  }
  std::vector<double> buf(static_cast<std::size_t>(top) + 1);
  detail::bessel_miller(top, x, buf);
  for (int m = lo; m <= hi; ++m) {
    out[static_cast<std::size_t>(m - lo)] = signed_value(m, buf[static_cast<std::size_t>(std::abs(m))]);
  }
}

/// J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2.
inline double bessel_j_prime(int n, double x) {
  detail::check_bessel_args(n, x);
  std::array<double, 3> v{};
  bessel_j_range(n - 1, n + 1, x, v);
  return 0.5 * (v[0] - v[2]);
}

namespace detail {

inline double mcmahon_guess(int n, int k) {
  const double beta = (k + 0.5 * n - 0.25) * std::numbers::pi;
  const double mu = 4.0 * n * n;
  const double b8 = 8.0 * beta;
  return beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);
}

// Newton from the McMahon guess, kept inside a sign-change bracket [a, b].
inline double refine_zero(int n, int k, double a, double b, double fa) {
  double x = mcmahon_guess(n, k);
  if (!(x > a && x < b)) x = 0.5 * (a + b);
  constexpr int kBudget = 200;
  for (int it = 0; it < kBudget; ++it) {
    std::array<double, 3> v{};
    bessel_j_range(n - 1, n + 1, x, v);
    const double f = v[1];
    const double df = 0.5 * (v[0] - v[2]);
    if (f == 0.0) return x;
    if ((f > 0.0) == (fa > 0.0)) {
      a = x;
      fa = f;
    } else {
      b = x;
    }
    double next = x - f / df;
    if (!(next > a && next < b) || !std::isfinite(next)) next = 0.5 * (a + b);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 4e-16 * x || (b - a) <= 4e-16 * b) return x;
  }
  std::ostringstream msg;
  msg << "bessel_zero(" << n << ", " << k << ") did not converge in " << kBudget
      << " iterations; bracket [" << a << ", " << b << "]";
  throw NumericalError(msg.str());
}

}  // namespace detail

/// The first `count` positive zeros of J_n, ascending.
///
/// Zeros are bracketed by a forward scan with step 0.5 (consecutive zeros are
/// more than 2.9 apart for every order), then refined by safeguarded Newton.
inline std::vector<double> bessel_zeros(int n, int count) {
  if (n < 0 || n > 128 || count < 1 || count > 128) {
    throw ArgumentError("bessel_zeros: need 0 <= n <= 128 and 1 <= k <= 128");
  }
  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(count));
  // J_n > 0 on (0, j_{n,1}) and j_{n,1} > n.
  double a = (n == 0) ? 0.0 : static_cast<double>(n);
  double fa = (n == 0) ? 1.0 : bessel_j(n, a);
  constexpr double kStep = 0.5;
  while (static_cast<int>(zeros.size()) < count) {
    const double b = a + kStep;
    const double fb = bessel_j(n, b);
    if (fb == 0.0) {
      zeros.push_back(b);
      a = b + 1e-9;
      fa = bessel_j(n, a);
      continue;
    }
    if ((fa > 0.0) != (fb > 0.0)) {
      zeros.push_back(detail::refine_zero(n, static_cast<int>(zeros.size()) + 1, a, b, fa));
    }
    a = b;
    fa = fb;
  }
  return zeros;
}

/// The k-th positive zero j_{n,k} of J_n.
inline double bessel_zero(int n, int k) {
  if (k < 1) throw ArgumentError("bessel_zero: k must be positive");
  return bessel_zeros(n, k).back();
}

/// Gauss-Legendre rule mapped to (0,1); exact for polynomials of degree <= 2*order-1.
inline QuadratureRule gauss_legendre(int order) {
  if (order < 1 || order > 2048) throw ArgumentError("gauss_legendre: order outside [1, 2048]");
  const auto n = static_cast<std::size_t>(order);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is descending in i; map t = (1 - x)/2 so nodes ascend.
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

/// log Gamma(x) for x > 0, Lanczos approximation with g = 7 and nine coefficients
/// (relative accuracy ~1e-15), reflection below 1/2.
inline double log_gamma(double x) {
  static constexpr std::array<double, 9> kLanczos = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double kG = 7.0;
  if (!(x > 0.0)) throw ArgumentError("log_gamma: argument must be positive");
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

/// B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
inline double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("beta_function: arguments must be positive");
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

}  // namespace sbesov
