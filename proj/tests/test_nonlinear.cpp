#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sbesov/nonlinear.hpp"
#include "sbesov/samples.hpp"

using namespace sbesov;

namespace {
struct Setup {
  BasisPtr basis = build_basis(16, 16);
  GridPtr grid = build_grid(64, 128);
  NonlinearWorkspace ws{basis, grid};
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

TEST_CASE("workspace modes are divergence-free", "[nonlinear]") {
  const Setup s;
  CHECK(s.ws.divergence_bound() <= 1e-9);
  CHECK(s.ws.fine_transform().grid()->radial_count() == 96);
  CHECK(s.ws.fine_transform().grid()->angular_count() == 192);
  CHECK_THROWS_AS(NonlinearWorkspace(s.basis, s.grid, {1.0, 3, 1e-7, 1}), ArgumentError);
}

TEST_CASE("nonlinear term basics", "[nonlinear]") {
  const Setup s;
  CHECK(max_abs(nonlinear_coeffs(SpectralField(s.basis), s.ws).coeffs) == 0.0);

  // A single swirl is a steady Euler flow: (u . grad) u = -|u|^2/r e_r is a pure gradient.
  const auto swirl = SpectralField::unit(s.basis, *s.basis->find(0, Parity::cosine, 1));
  const auto ns = nonlinear_coeffs(swirl, s.ws);
  CHECK(std::abs(coefficient_dot(ns, swirl)) <= 1e-10);
  CHECK(max_abs(ns.coeffs) <= 1e-10);

  const auto u = lowpass_random(s.basis, 0.5, 11);
  const auto n1 = nonlinear_coeffs(u, s.ws);
  for (double c : {-2.5, 0.1, 3.0}) {
    const auto nc = nonlinear_coeffs(c * u, s.ws);
    for (std::size_t i = 0; i < n1.size(); ++i) CHECK(std::abs(nc.coeffs[i] - c * c * n1.coeffs[i]) <= 1e-12 * c * c * max_abs(n1.coeffs));
  }
}

TEST_CASE("weak and strong forms agree", "[nonlinear]") {
  const Setup s;
  for (unsigned seed = 0; seed < 5; ++seed) {
    for (double frac : {1.0 / 3, 0.5, 1.0}) {
      const auto u = lowpass_random(s.basis, frac, 100 + seed);
      const auto weak = nonlinear_coeffs(u, s.ws);
      const auto strong = convection_strong(u, s.ws.transform());
      CHECK(max_abs((weak - strong).coeffs) <= 1e-7 * max_abs(weak.coeffs));
    }
  }
}

TEST_CASE("two swirls: an exact interaction", "[nonlinear]") {
  // Radial swirls u = f(r) e_theta and g(r) e_theta give (u . grad) u = -(f + g)^2 / r e_r,
  // again a gradient, so N vanishes for any combination of n = 0 modes.
  const Setup s;
  SpectralField u(s.basis);
  for (int k = 1; k <= 5; ++k) u.coeffs[*s.basis->find(0, Parity::cosine, k)] = 1.0 / k;
  CHECK(max_abs(nonlinear_coeffs(u, s.ws).coeffs) <= 1e-9);
}

TEST_CASE("transport term is energy-neutral", "[nonlinear]") {
  const Setup s;
  for (unsigned seed = 0; seed < 100; ++seed) {
    const auto u = lowpass_random(s.basis, seed % 2 ? 0.5 : 1.0, 500 + seed);
    const auto n = nonlinear_coeffs(u, s.ws);
    CHECK(std::abs(coefficient_dot(n, u)) <= 1e-9);
  }
}

TEST_CASE("energy identity residuals", "[nonlinear]") {
  const Setup s;
  const auto zero = energy_identity_residual(SpectralField(s.basis), s.ws);
  CHECK(zero.transport == 0.0);
  CHECK(zero.dissipation == 0.0);
  const auto& tr = s.ws.transform();
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{40}}) {
    const auto e = SpectralField::unit(s.basis, i);
    const auto curl = tr.synthesize_quantity(e, Quantity::curl);
    double enstrophy = 0.0;
    for (std::size_t k = 0; k < curl.size(); ++k) enstrophy += s.grid->weights()[k] * curl[k] * curl[k];
    CHECK(std::abs(enstrophy - s.basis->mode(i).lambda) <= 1e-8);
    CHECK(energy_identity_residual(e, s.ws).dissipation <= 1e-8);
  }
  const auto r = energy_identity_residual(lowpass_random(s.basis, 0.5, 9), s.ws);
  CHECK(r.transport <= 1e-9);
  CHECK(r.dissipation <= 1e-8);
}

TEST_CASE("dealiasing check", "[nonlinear]") {
  const Setup s;
  const auto third = dealiasing_check(lowpass_random(s.basis, 1.0 / 3, 4), s.ws);
  CHECK(third.pass);
  CHECK(third.margin > 10.0);
  CHECK(third.probed.size() == 3);
  CHECK(dealiasing_check(SpectralField(s.basis), s.ws).pass);

  const NonlinearWorkspace coarse(s.basis, build_grid(24, 40));
  const auto full = random_field(s.basis, 4);
  CHECK_FALSE(dealiasing_check(full, coarse).pass);
  CHECK_THROWS_AS(nonlinear_coeffs(full, coarse), ResolutionError);
  // The same probes are drawn every time.
  CHECK(dealiasing_check(full, coarse).probed == dealiasing_check(full, coarse).probed);
}

TEST_CASE("Helmholtz projection", "[nonlinear]") {
  const Setup s;
  const SpectralTransform& tr = s.ws.transform();
  const auto f = random_field(s.basis, 2);
  const auto in_span = helmholtz_project(tr.synthesize(f), tr);
  CHECK(max_abs(in_span.remainder.ux) <= 1e-9);
  CHECK(max_abs(in_span.remainder.uy) <= 1e-9);
  CHECK(max_abs((in_span.projection - f).coeffs) <= 1e-9);

  GridVectorField grad(s.grid);
  for (std::size_t i = 0; i < s.grid->size(); ++i) {
    grad.ux[i] = s.grid->x(i);
    grad.uy[i] = -s.grid->y(i);
  }
  const auto g = helmholtz_project(grad, tr);
  CHECK(max_abs(g.projection.coeffs) <= 1e-9);

  // Arbitrary grid data: Pythagoras, orthogonal remainder, idempotence.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  GridVectorField v(s.grid);
  for (std::size_t i = 0; i < s.grid->size(); ++i) {
    v.ux[i] = normal(rng);
    v.uy[i] = normal(rng);
  }
  const auto split = helmholtz_project(v, tr);
  const double total = grid_l2_squared(v);
  const double parts = grid_l2_squared(tr.synthesize(split.projection)) + grid_l2_squared(split.remainder);
  CHECK(std::abs(total - parts) <= 1e-8 * total);
  CHECK(max_abs(tr.analyze(split.remainder).coeffs) <= 1e-9 * std::sqrt(total));
  const auto again = helmholtz_project(tr.synthesize(split.projection), tr);
  CHECK(max_abs((again.projection - split.projection).coeffs) <= 1e-12 * max_abs(split.projection.coeffs));
}
