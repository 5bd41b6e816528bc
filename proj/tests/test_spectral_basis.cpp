#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sbesov/basis_io.hpp"
#include "sbesov/spectral_basis.hpp"

using namespace sbesov;

namespace {

constexpr double kJ01 = 2.404825557695773;
constexpr double kJ11 = 3.831705970207512;

// Stream function built directly from bessel_j, unnormalized.
double raw_stream(const EigenMode& m, double x, double y) {
  const double r = std::hypot(x, y);
  const double th = std::atan2(y, x);
  const double ang = m.parity == Parity::cosine ? std::cos(m.n * th) : std::sin(m.n * th);
  return bessel_j(m.n, m.zero * r) * ang;
}

// u = (psi_y, -psi_x) / velocity_norm by central differences.
std::array<double, 2> fd_velocity(const EigenMode& m, double x, double y, double h = 1e-5) {
  const double px = (raw_stream(m, x + h, y) - raw_stream(m, x - h, y)) / (2 * h);
  const double py = (raw_stream(m, x, y + h) - raw_stream(m, x, y - h)) / (2 * h);
  return {py / m.velocity_norm, -px / m.velocity_norm};
}

SpectralField random_field(const BasisPtr& b, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SpectralField f(b);
  for (double& c : f.coeffs) c = g(rng);
  return f;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("build_basis counts, ordering and eigenvalues", "[basis]") {
  const auto b11 = build_basis(1, 1);
  REQUIRE(b11->size() == 3);
  CHECK(b11->mode(0).n == 0);
  CHECK(std::abs(b11->mode(0).lambda - kJ01 * kJ01) <= 1e-12);
  CHECK(std::abs(b11->mode(1).lambda - kJ11 * kJ11) <= 1e-11);
  CHECK(b11->mode(1).lambda == b11->mode(2).lambda);
  CHECK(b11->mode(1).parity == Parity::cosine);
  CHECK(b11->mode(2).parity == Parity::sine);

  CHECK(build_basis(2, 2)->size() == 10);
  const auto b = build_basis(8, 8);
  CHECK(b->size() == 8 * (2 * 8 + 1));
  CHECK(std::abs(b->lambda_min() - 5.783185962946785) <= 1e-9);
  CHECK(b->lambda_min() > 0.0);
  for (std::size_t i = 1; i < b->size(); ++i) CHECK(b->mode(i - 1).lambda <= b->mode(i).lambda);
  for (int n = 0; n <= 8; ++n) {
    for (int k = 1; k <= 8; ++k) {
      CHECK(b->find(n, Parity::cosine, k).has_value());
      CHECK(b->find(n, Parity::sine, k).has_value() == (n > 0));
    }
  }
  CHECK_THROWS_AS(build_basis(0, 3), ArgumentError);
  CHECK_THROWS_AS(build_basis(3, 129), ArgumentError);
}

TEST_CASE("mode normalization invariants and quadrature cross-check", "[basis]") {
  const auto b = build_basis(6, 6);
  const auto grid = build_grid(64, 128);
  for (const auto& m : b->modes()) {
    CHECK(std::abs(m.lambda - std::pow(bessel_zero(m.n, m.k), 2)) <= 1e-10 * m.lambda);
    CHECK(std::abs(m.velocity_norm * m.velocity_norm - m.lambda * m.stream_norm * m.stream_norm) <=
          1e-12 * m.velocity_norm * m.velocity_norm);
    double s = 0.0;
    for (std::size_t node = 0; node < grid->size(); ++node) {
      const double psi = raw_stream(m, grid->x(node), grid->y(node));
      s += grid->weights()[node] * psi * psi;
    }
    CHECK(std::abs(std::sqrt(s) - m.stream_norm) <= 1e-10 * m.stream_norm);
  }
}

TEST_CASE("polar grid weights and exactness", "[basis][grid]") {
  const auto g = build_grid(16, 32);
  double area = 0.0;
  for (double w : g->weights()) area += w;
  CHECK(std::abs(area - std::numbers::pi) <= 1e-12);
  CHECK(g->self_test_error() <= 1e-12);
  CHECK(g->size() == 16u * 32u);
  CHECK_THROWS_AS(build_grid(16, 31), ArgumentError);
  CHECK_THROWS_AS(build_grid(16, 2), ArgumentError);
  CHECK_THROWS_AS(build_grid(0, 32), ArgumentError);
}

TEST_CASE("mode velocities match finite differences of the stream function", "[basis]") {
  const auto b = build_basis(5, 4);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  const std::array<Quantity, 2> qs{Quantity::ux, Quantity::uy};
  for (int s = 0; s < 20; ++s) {
    const double x = u(rng);
    const double y = u(rng);
    const auto vals = mode_values_at(*b, x, y, qs);
    for (std::size_t i = 0; i < b->size(); ++i) {
      const auto ref = fd_velocity(b->mode(i), x, y);
      CHECK(std::abs(vals[0][i] - ref[0]) <= 1e-7);
      CHECK(std::abs(vals[1][i] - ref[1]) <= 1e-7);
    }
  }
}

TEST_CASE("synthesize: zero field, swirl mode and transform consistency", "[basis]") {
  const auto b = build_basis(4, 4);
  const auto grid = build_grid(24, 48);
  const SpectralTransform tr(b, grid);
  const auto zero = tr.synthesize(SpectralField(b));
  CHECK(max_abs(zero.ux) == 0.0);
  CHECK(max_abs(zero.uy) == 0.0);

  const auto swirl = tr.synthesize(SpectralField::unit(b, *b->find(0, Parity::cosine, 1)));
  for (std::size_t node = 0; node < grid->size(); ++node) {
    const double r = std::hypot(grid->x(node), grid->y(node));
    const double ur = (swirl.ux[node] * grid->x(node) + swirl.uy[node] * grid->y(node)) / r;
    CHECK(std::abs(ur) <= 1e-13);
  }

  const auto f = random_field(b, 17);
  const auto v = tr.synthesize(f);
  for (std::size_t node = 0; node < grid->size(); node += 37) {
    CHECK(std::abs(v.ux[node] - evaluate_at(f, grid->x(node), grid->y(node), Quantity::ux)) <= 1e-12);
    CHECK(std::abs(v.uy[node] - evaluate_at(f, grid->x(node), grid->y(node), Quantity::uy)) <= 1e-12);
  }
  // The origin is a regular point.
  const double ux0 = evaluate_at(f, 0.0, 0.0, Quantity::ux);
  CHECK(std::abs(ux0 - evaluate_at(f, 1e-9, 0.0, Quantity::ux)) <= 1e-7);
}

TEST_CASE("boundary conditions hold for every mode", "[basis]") {
  const auto b = build_basis(8, 8);
  const std::array<Quantity, 5> qs{Quantity::ux, Quantity::uy, Quantity::curl, Quantity::dx_uy, Quantity::dy_ux};
  double worst_normal = 0.0;
  double worst_curl = 0.0;
  double worst_curl_from_gradient = 0.0;
  for (int l = 0; l < 64; ++l) {
    const double th = 2 * std::numbers::pi * (l + 0.3) / 64;
    const double x = std::cos(th);
    const double y = std::sin(th);
    const auto v = mode_values_at(*b, x, y, qs);
    for (std::size_t i = 0; i < b->size(); ++i) {
      worst_normal = std::max(worst_normal, std::abs(v[0][i] * x + v[1][i] * y));
      worst_curl = std::max(worst_curl, std::abs(v[2][i]));
      worst_curl_from_gradient = std::max(worst_curl_from_gradient, std::abs(v[3][i] - v[4][i]));
    }
  }
  CHECK(worst_normal <= 1e-8);
  CHECK(worst_curl <= 1e-8);
  CHECK(worst_curl_from_gradient <= 1e-8);
}

TEST_CASE("curl is lambda times the normalized stream function", "[basis]") {
  const auto b = build_basis(4, 3);
  const std::array<Quantity, 4> qs{Quantity::curl, Quantity::stream, Quantity::dx_uy, Quantity::dy_ux};
  const auto v = mode_values_at(*b, 0.31, -0.44, qs);
  for (std::size_t i = 0; i < b->size(); ++i) {
    CHECK(std::abs(v[0][i] - b->mode(i).lambda * v[1][i]) <= 1e-12 * b->mode(i).lambda);
    CHECK(std::abs(v[0][i] - (v[2][i] - v[3][i])) <= 1e-11 * b->mode(i).lambda);
  }
}

TEST_CASE("Gram matrix is the identity under grid quadrature", "[basis]") {
  const auto b = build_basis(8, 8);
  const auto grid = build_grid(64, 128);
  const SpectralTransform tr(b, grid);
  double off = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < b->size(); ++i) {
    const auto col = tr.analyze(tr.synthesize(SpectralField::unit(b, i)));
    for (std::size_t j = 0; j < b->size(); ++j) {
      if (i == j) diag = std::max(diag, std::abs(col.coeffs[j] - 1.0));
      else off = std::max(off, std::abs(col.coeffs[j]));
    }
  }
  INFO("off-diagonal " << off << " diagonal " << diag);
  CHECK(off <= 1e-9);
  CHECK(diag <= 1e-9);
}

TEST_CASE("analyze inverts synthesize and annihilates gradients", "[basis]") {
  const auto b = build_basis(8, 8);
  const auto grid = build_grid(64, 128);
  const SpectralTransform tr(b, grid);
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto c = random_field(b, seed);
    const auto back = tr.analyze(tr.synthesize(c));
    double err = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) err = std::max(err, std::abs(back.coeffs[i] - c.coeffs[i]));
    CHECK(err <= 1e-10);
  }
  GridVectorField radial(grid);
  GridVectorField saddle(grid);
  for (std::size_t node = 0; node < grid->size(); ++node) {
    radial.ux[node] = grid->x(node);
    radial.uy[node] = grid->y(node);
    saddle.ux[node] = grid->x(node);
    saddle.uy[node] = -grid->y(node);
  }
  CHECK(max_abs(tr.analyze(radial).coeffs) <= 1e-10);
  CHECK(max_abs(tr.analyze(saddle).coeffs) <= 1e-10);
  CHECK(max_abs(tr.analyze(GridVectorField(grid)).coeffs) == 0.0);
  CHECK(max_abs(analyze(radial, b, grid).coeffs) <= 1e-10);
}

TEST_CASE("apply_stokes", "[basis]") {
  const auto b = build_basis(4, 4);
  const auto f = random_field(b, 9);
  CHECK(apply_stokes(f, 0.0).coeffs == f.coeffs);
  const auto e = SpectralField::unit(b, 0);
  CHECK(std::abs(apply_stokes(e, 1.0).coeffs[0] - 5.783185962946785) <= 1e-9);
  const auto twice = apply_stokes(apply_stokes(f, 0.5), 0.5);
  const auto once = apply_stokes(f, 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(twice.coeffs[i] - once.coeffs[i]) <= 1e-12 * std::abs(once.coeffs[i]));
}

// For tangential fields on the unit circle, int |grad u|^2 = int (curl u)^2 + int (div u)^2
// - int_{boundary} curvature |u|^2 ds. So the Dirichlet energy of a mode is lambda minus a
// rim term, not lambda alone. The rim term is computed independently with a trapezoid rule.
double rim_energy(const Basis& b, std::size_t mode) {
  const std::array<Quantity, 2> qs{Quantity::ux, Quantity::uy};
  constexpr int kPts = 256;
  double s = 0.0;
  for (int l = 0; l < kPts; ++l) {
    const double th = 2 * std::numbers::pi * l / kPts;
    const auto v = mode_values_at(b, std::cos(th), std::sin(th), qs);
    s += v[0][mode] * v[0][mode] + v[1][mode] * v[1][mode];
  }
  return s * 2 * std::numbers::pi / kPts;
}

TEST_CASE("mode gradients: divergence, Dirichlet energy and finite differences", "[basis]") {
  const auto b = build_basis(6, 6);
  const auto grid = build_grid(48, 96);
  const auto fine = build_grid(96, 192);
  const SpectralTransform tr(b, grid);
  const SpectralTransform trf(b, fine);
  for (std::size_t i = 0; i < b->size(); i += 3) {
    const auto g = tr.gradient(SpectralField::unit(b, i));
    double div = 0.0;
    for (std::size_t node = 0; node < grid->size(); ++node) div = std::max(div, std::abs(g.at(0, 0)[node] + g.at(1, 1)[node]));
    CHECK(div <= 1e-9);
    const auto gf = trf.gradient(SpectralField::unit(b, i));
    double energy = 0.0;
    for (std::size_t node = 0; node < fine->size(); ++node) {
      double s = 0.0;
      for (const auto& c : gf.comp) s += c[node] * c[node];
      energy += fine->weights()[node] * s;
    }
    const double expected = b->mode(i).lambda - rim_energy(*b, i);
    CHECK(std::abs(energy - expected) <= 1e-8 * expected);
    CHECK(std::abs(rim_energy(*b, i) - 2.0) <= 1e-10);
  }
  const auto zero = mode_gradient_values(b, 0, grid);
  CHECK(zero.comp[0].size() == grid->size());

  // Gradient components against central differences of the synthesized velocity.
  const auto f = random_field(b, 4);
  const double x = 0.37;
  const double y = -0.21;
  const double h = 1e-5;
  auto diff = [&](Quantity q, double dx, double dy) {
    return (evaluate_at(f, x + dx, y + dy, q) - evaluate_at(f, x - dx, y - dy, q)) / (2 * h);
  };
  CHECK(std::abs(evaluate_at(f, x, y, Quantity::dx_ux) - diff(Quantity::ux, h, 0)) <= 1e-5);
  CHECK(std::abs(evaluate_at(f, x, y, Quantity::dy_ux) - diff(Quantity::ux, 0, h)) <= 1e-5);
  CHECK(std::abs(evaluate_at(f, x, y, Quantity::dx_uy) - diff(Quantity::uy, h, 0)) <= 1e-5);
  CHECK(std::abs(evaluate_at(f, x, y, Quantity::dy_uy) - diff(Quantity::uy, 0, h)) <= 1e-5);
}

TEST_CASE("finite-difference Laplacian reproduces the eigenvalues", "[basis]") {
  const auto b = build_basis(3, 3);
  const auto grid = build_grid(24, 48);
  const SpectralTransform tr(b, grid);
  const double h = 2e-3;
  const std::array<Quantity, 2> qs{Quantity::ux, Quantity::uy};
  // -Laplacian of every mode at every node by the five-point stencil. The stencil
  // pokes slightly outside r = 1 near the rim, where the mode formulas extend smoothly.
  std::vector<GridVectorField> lap(b->size(), GridVectorField(grid));
  for (std::size_t node = 0; node < grid->size(); ++node) {
    const double x = grid->x(node);
    const double y = grid->y(node);
    const auto c = mode_values_at(*b, x, y, qs);
    const auto e = mode_values_at(*b, x + h, y, qs);
    const auto w = mode_values_at(*b, x - h, y, qs);
    const auto n = mode_values_at(*b, x, y + h, qs);
    const auto s = mode_values_at(*b, x, y - h, qs);
    for (std::size_t i = 0; i < b->size(); ++i) {
      lap[i].ux[node] = -(e[0][i] + w[0][i] + n[0][i] + s[0][i] - 4 * c[0][i]) / (h * h);
      lap[i].uy[node] = -(e[1][i] + w[1][i] + n[1][i] + s[1][i] - 4 * c[1][i]) / (h * h);
    }
  }
  for (std::size_t i = 0; i < b->size(); ++i) {
    const auto spectral = apply_stokes(SpectralField::unit(b, i), 1.0);
    const auto measured = tr.analyze(lap[i]);
    for (std::size_t j = 0; j < b->size(); ++j) {
      CHECK(std::abs(measured.coeffs[j] - spectral.coeffs[j]) <= 1e-4 * b->mode(i).lambda);
    }
  }
}

TEST_CASE("basis cache round-trips exactly", "[basis][io]") {
  const auto b = build_basis(5, 5);
  const auto text = basis_to_json(*b);
  CHECK(text.find("\"format\": \"stokes-besov-basis/1\"") != std::string::npos);
  const auto back = basis_from_json(text);
  REQUIRE(back->size() == b->size());
  CHECK(*back == *b);
  for (std::size_t i = 0; i < b->size(); ++i) {
    CHECK(back->mode(i).velocity_norm == b->mode(i).velocity_norm);
    CHECK(back->mode(i).lambda == b->mode(i).lambda);
  }
  CHECK(basis_to_json(*back) == text);
  CHECK_THROWS_AS(basis_from_json("{\"format\": \"other/1\"}"), ArgumentError);
  CHECK_THROWS_AS(basis_from_json("not json"), ArgumentError);
}
