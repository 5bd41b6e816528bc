#pragma once

// Smooth dyadic partition of unity on (0, inf) and its diagonal action phi_j(sqrt(A)).

#include <cmath>

#include "sbesov/errors.hpp"
#include "sbesov/spectral_basis.hpp"

namespace sbesov {

namespace detail {
inline double rho(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace detail

/// Transition function: 1 on (-inf, 1], 0 on [2, inf), C-infinity and nonincreasing between.
inline double eta(double lambda) {
  if (lambda <= 1.0) return 1.0;
  if (lambda >= 2.0) return 0.0;
  const double a = detail::rho(2.0 - lambda);
  const double b = detail::rho(lambda - 1.0);
  return a / (a + b);
}

/// phi_j(lambda) = eta(2^-j lambda) - eta(2^(1-j) lambda), supported in (2^(j-1), 2^(j+1)).
inline double phi(int j, double lambda) {
  if (!(lambda > 0.0)) throw ArgumentError("phi: lambda must be positive");
  return eta(std::ldexp(lambda, -j)) - eta(std::ldexp(lambda, 1 - j));
}

/// Phi_j = phi_{j-1} + phi_j + phi_{j+1}, evaluated in telescoped form so that it is
/// exactly 1 on the support of phi_j.
inline double Phi(int j, double lambda) {
  if (!(lambda > 0.0)) throw ArgumentError("Phi: lambda must be positive");
  return eta(std::ldexp(lambda, -j - 1)) - eta(std::ldexp(lambda, 2 - j));
}

/// Dyadic indices that act nontrivially on a basis; all other bands are exactly zero.
struct BandRange {
  int j_lo = 0;
  int j_hi = -1;
  bool contains(int j) const { return j >= j_lo && j <= j_hi; }
  int count() const { return j_hi - j_lo + 1; }
};

/// Smallest j with 2^(j+1) > sqrt(lambda_min) and largest j with 2^(j-1) < sqrt(lambda_max).
inline BandRange active_bands(const Basis& basis) {
  if (basis.empty()) throw ArgumentError("active_bands: empty basis");
  const double lo = std::sqrt(basis.lambda_min());
  const double hi = std::sqrt(basis.lambda_max());
  int j_lo = static_cast<int>(std::floor(std::log2(lo))) - 2;
  while (!(std::ldexp(1.0, j_lo + 1) > lo)) ++j_lo;
  int j_hi = static_cast<int>(std::ceil(std::log2(hi))) + 2;
  while (!(std::ldexp(1.0, j_hi - 1) < hi)) --j_hi;
  return {j_lo, j_hi};
}

/// Per-mode multipliers phi_j(sqrt(lambda_m)).
inline std::vector<double> band_weights(const Basis& basis, int j) {
  std::vector<double> w(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) w[i] = phi(j, std::sqrt(basis.mode(i).lambda));
  return w;
}

inline std::vector<double> wide_band_weights(const Basis& basis, int j) {
  std::vector<double> w(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) w[i] = Phi(j, std::sqrt(basis.mode(i).lambda));
  return w;
}

/// phi_j(sqrt(A)) f.
inline SpectralField apply_band(const SpectralField& f, int j) {
  SpectralField out = f;
  const auto w = band_weights(*f.basis, j);
  for (std::size_t i = 0; i < out.size(); ++i) out.coeffs[i] *= w[i];
  return out;
}

/// Phi_j(sqrt(A)) f.
inline SpectralField apply_wide_band(const SpectralField& f, int j) {
  SpectralField out = f;
  const auto w = wide_band_weights(*f.basis, j);
  for (std::size_t i = 0; i < out.size(); ++i) out.coeffs[i] *= w[i];
  return out;
}

}  // namespace sbesov
