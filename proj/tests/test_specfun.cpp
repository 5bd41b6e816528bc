#define CATCH_CONFIG_MAIN
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "oracles.hpp"
#include "sbesov/specfun.hpp"

using namespace sbesov;

namespace {
// Frozen from the long-double series + bisection oracle (see the first test case).
constexpr double kJ01 = 2.404825557695773;
constexpr double kJ11 = 3.831705970207512;
}  // namespace

TEST_CASE("frozen zero values agree with the series bisection oracle", "[specfun][oracle]") {
  const double j01 = oracle::bisect([](long double x) { return oracle::bessel_series(0, x); }, 2.0L, 3.0L);
  const double j11 = oracle::bisect([](long double x) { return oracle::bessel_series(1, x); }, 3.0L, 4.5L);
  CHECK(std::abs(j01 - kJ01) <= 1e-15);
  CHECK(std::abs(j11 - kJ11) <= 1e-15);
}

TEST_CASE("bessel_j point values", "[specfun]") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(std::abs(bessel_j(0, kJ01)) <= 1e-12);
}

TEST_CASE("bessel_j matches Boost.Math across the supported range", "[specfun]") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> order(0, 256);
  std::uniform_real_distribution<double> arg(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 3000; ++s) {
    const int n = order(rng);
    // Cover small, transition and large arguments.
    const double u = arg(rng);
    const double x = (s % 3 == 0) ? 30.0 * u : (s % 3 == 1) ? 600.0 * u : 1.0e4 * u;
    const double err = std::abs(bessel_j(n, x) - boost::math::cyl_bessel_j(n, x));
    worst = std::max(worst, err);
  }
  INFO("worst absolute error " << worst);
  CHECK(worst <= 1e-12);
}

TEST_CASE("bessel_j series branch against long-double oracle", "[specfun]") {
  for (int n = 0; n <= 40; n += 3) {
    for (double x = 0.0; x <= 12.0; x += 0.37) {
      CHECK(std::abs(bessel_j(n, x) - static_cast<double>(oracle::bessel_series(n, x))) <= 1e-13);
    }
  }
}

TEST_CASE("bessel_j rejects out-of-range input", "[specfun]") {
  CHECK_THROWS_AS(bessel_j(-1, 1.0), ArgumentError);
  CHECK_THROWS_AS(bessel_j(257, 1.0), ArgumentError);
  CHECK_THROWS_AS(bessel_j(3, -0.5), ArgumentError);
  CHECK_THROWS_AS(bessel_j(3, 2.0e4), ArgumentError);
  CHECK_THROWS_AS(bessel_j(0, std::nan("")), ArgumentError);
}

TEST_CASE("bessel_j_prime", "[specfun]") {
  CHECK(bessel_j_prime(0, 0.0) == 0.0);
  CHECK(bessel_j_prime(1, 0.0) == Catch::Approx(0.5).margin(1e-15));
  const double j1 = static_cast<double>(oracle::bessel_series(1, kJ01));
  CHECK(std::abs(bessel_j_prime(0, kJ01) + j1) <= 1e-11);
  // Finite differences as an independent check of the recurrence.
  for (int n : {0, 1, 5, 17}) {
    for (double x : {0.3, 4.2, 19.0, 55.5}) {
      const double h = 1e-5;
      const double fd = (bessel_j(n, x + h) - bessel_j(n, x - h)) / (2 * h);
      CHECK(std::abs(bessel_j_prime(n, x) - fd) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(bessel_j_prime(300, 1.0), ArgumentError);
}

TEST_CASE("bessel_j_range matches pointwise evaluation including negative orders", "[specfun]") {
  std::array<double, 7> v{};
  for (double x : {0.0, 0.7, 11.0, 13.5, 140.0}) {
    bessel_j_range(-3, 3, x, v);
    for (int m = -3; m <= 3; ++m) {
      const double ref = ((m < 0 && (-m) % 2 == 1) ? -1.0 : 1.0) * bessel_j(std::abs(m), x);
      CHECK(std::abs(v[static_cast<std::size_t>(m + 3)] - ref) <= 1e-14);
    }
  }
}

TEST_CASE("bessel_zero oracle values and ordering", "[specfun]") {
  CHECK(std::abs(bessel_zero(0, 1) - kJ01) <= 1e-11);
  CHECK(std::abs(bessel_zero(1, 1) - kJ11) <= 1e-11);
  CHECK(bessel_zero(0, 1) < bessel_zero(0, 2));
  CHECK_THROWS_AS(bessel_zero(0, 0), ArgumentError);
  CHECK_THROWS_AS(bessel_zero(129, 1), ArgumentError);
}

TEST_CASE("stored zeros are roots and interlace", "[specfun]") {
  constexpr int kN = 33;
  constexpr int kK = 33;
  std::vector<std::vector<double>> table;
  for (int n = 0; n <= kN; ++n) table.push_back(bessel_zeros(n, kK));
  for (int n = 0; n <= kN; ++n) {
    for (int k = 0; k < kK; ++k) {
      CHECK(std::abs(bessel_j(n, table[n][k])) <= 1e-10);
    }
  }
  for (int n = 0; n < kN; ++n) {
    for (int k = 0; k + 1 < kK; ++k) {
      CHECK(table[n][k] < table[n + 1][k]);
      CHECK(table[n + 1][k] < table[n][k + 1]);
    }
  }
}

TEST_CASE("bessel_zero reaches the edge of its range", "[specfun]") {
  const double z = bessel_zero(128, 128);
  CHECK(std::abs(bessel_j(128, z)) <= 1e-10);
  CHECK(std::abs(z - boost::math::cyl_bessel_j_zero(128.0, 128)) <= 1e-11);
}

TEST_CASE("gauss_legendre rules", "[specfun]") {
  const auto one = gauss_legendre(1);
  REQUIRE(one.order() == 1);
  CHECK(one.nodes[0] == Catch::Approx(0.5).margin(1e-16));
  CHECK(one.weights[0] == Catch::Approx(1.0).margin(1e-16));

  const auto r16 = gauss_legendre(16);
  double sum = 0.0;
  for (double w : r16.weights) sum += w;
  CHECK(std::abs(sum - 1.0) <= 1e-14);

  const auto r2 = gauss_legendre(2);
  double x2 = 0.0;
  for (int i = 0; i < 2; ++i) x2 += r2.weights[i] * r2.nodes[i] * r2.nodes[i];
  CHECK(std::abs(x2 - 1.0 / 3.0) <= 1e-15);

  CHECK_THROWS_AS(gauss_legendre(0), ArgumentError);
  CHECK_THROWS_AS(gauss_legendre(2049), ArgumentError);
}

TEST_CASE("gauss_legendre invariants and polynomial exactness", "[specfun]") {
  for (int order : {3, 7, 64, 513, 2048}) {
    const auto rule = gauss_legendre(order);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) {
      CHECK(rule.weights[i] > 0.0);
      CHECK(rule.nodes[i] > 0.0);
      CHECK(rule.nodes[i] < 1.0);
      if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      sum += rule.weights[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-13);
    const int deg = std::min(2 * order - 1, 60);
    double integral = 0.0;
    for (int i = 0; i < order; ++i) integral += rule.weights[i] * std::pow(rule.nodes[i], deg);
    CHECK(std::abs(integral - 1.0 / (deg + 1)) <= 1e-14);
  }
}

TEST_CASE("radial quadrature doubling is self-consistent", "[specfun]") {
  auto integral = [](int order) {
    const auto rule = gauss_legendre(order);
    const double z = bessel_zero(0, 1);
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
      const double j = bessel_j(0, z * rule.nodes[i]);
      s += rule.weights[i] * j * j * rule.nodes[i];
    }
    return s;
  };
  const double a = integral(32);
  const double b = integral(64);
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
  // Closed form: J_1(j01)^2 / 2.
  const double j1 = bessel_j(1, bessel_zero(0, 1));
  CHECK(std::abs(b - 0.5 * j1 * j1) <= 1e-14);
}

TEST_CASE("log_gamma and beta_function", "[specfun]") {
  CHECK(beta_function(1.0, 1.0) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(beta_function(0.5, 0.5) - std::numbers::pi) <= 1e-12 * std::numbers::pi);
  // Cross-check pi with quadrature of t^-1/2 (1-t)^-1/2 away from the endpoints.
  const double quad = oracle::beta_type_integral([](double) { return 1.0; }, 0.5, 0.5);
  CHECK(std::abs(quad - std::numbers::pi) <= 1e-9);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  for (int s = 0; s < 200; ++s) {
    const double a = u(rng);
    const double b = u(rng);
    CHECK(beta_function(a, b) == beta_function(b, a));
    const double ref = std::beta(a, b);
    CHECK(std::abs(beta_function(a, b) - ref) <= 1e-12 * ref);
    CHECK(std::abs(log_gamma(a) - std::lgamma(a)) <= 1e-13 * std::max(1.0, std::abs(std::lgamma(a))));
  }
  CHECK_THROWS_AS(beta_function(0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(beta_function(1.0, -2.0), ArgumentError);
}

TEST_CASE("beta at the critical exponents matches quadrature", "[specfun]") {
  // d = 2, p = 4: B(d/p, 1 - d/p) = B(1/2, 1/2).
  const double d = 2.0;
  const double p = 4.0;
  const double a = d / p;
  const double quad = oracle::beta_type_integral([](double) { return 1.0; }, a, 1.0 - a);
  CHECK(std::abs(beta_function(a, 1.0 - a) - quad) <= 1e-8);
}
