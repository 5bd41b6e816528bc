#pragma once

// Deterministic sample fields for scans and experiments.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sbesov/littlewood_paley.hpp"
#include "sbesov/spectral_basis.hpp"

namespace sbesov {

/// Independent standard normal coefficients.
inline SpectralField random_field(const BasisPtr& basis, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SpectralField f(basis);
  for (double& c : f.coeffs) c = g(rng);
  return f;
}

/// Random coefficients weighted by phi_j: a field living in band j only.
inline SpectralField band_random(const BasisPtr& basis, int j, std::uint64_t seed) {
  return apply_band(random_field(basis, seed), j);
}

/// Coefficients c_m = w(lambda_m) (e_m(x0) . dir): the spectral projection of a
/// direction-weighted delta at x0, filtered by w. Such fields are the near-extremizers
/// of L^r -> L^p band estimates.
template <class Weight>
SpectralField point_concentrated(const BasisPtr& basis, double x0, double y0, double angle, Weight w) {
  const std::array<Quantity, 2> qs{Quantity::ux, Quantity::uy};
  const auto vals = mode_values_at(*basis, x0, y0, qs);
  SpectralField f(basis);
  const double cx = std::cos(angle);
  const double cy = std::sin(angle);
  for (std::size_t i = 0; i < f.size(); ++i) f.coeffs[i] = w(basis->mode(i).lambda) * (vals[0][i] * cx + vals[1][i] * cy);
  return f;
}

/// Spectral slope data: c_m = lambda_m^(-slope/2) times a random sign.
inline SpectralField spectral_slope(const BasisPtr& basis, double slope, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin;
  SpectralField f(basis);
  for (std::size_t i = 0; i < f.size(); ++i) f.coeffs[i] = (coin(rng) ? 1.0 : -1.0) * std::pow(basis->mode(i).lambda, -0.5 * slope);
  return f;
}

/// Unit-norm random field keeping only modes with sqrt(lambda) <= fraction * sqrt(lambda_max).
inline SpectralField lowpass_random(const BasisPtr& basis, double fraction, std::uint64_t seed) {
  auto f = random_field(basis, seed);
  const double cut = fraction * std::sqrt(basis->lambda_max());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::sqrt(basis->mode(i).lambda) > cut) f.coeffs[i] = 0.0;
  }
  const double n = coefficient_l2(f);
  if (n > 0.0) f *= 1.0 / n;
  return f;
}

/// Test fields for the band-j multiplier scan: one band-limited random field, one
/// broadband random field, and three localized deltas smoothed by Phi_j.
inline std::vector<SpectralField> multiplier_samples(const BasisPtr& basis, int j) {
  std::vector<SpectralField> out{band_random(basis, j, 10 + static_cast<std::uint64_t>(j)),
                                 random_field(basis, 20 + static_cast<std::uint64_t>(j))};
  const auto w = [j](double lam) { return Phi(j, std::sqrt(lam)); };
  out.push_back(point_concentrated(basis, 0.0, 0.0, 0.3, w));
  out.push_back(point_concentrated(basis, 0.5, 0.1, 0.3, w));
  out.push_back(point_concentrated(basis, 0.85, -0.2, 0.3, w));
  return out;
}

}  // namespace sbesov
