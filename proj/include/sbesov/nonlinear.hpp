#pragma once

// The projected convection term N(u) = P div(u (x) u), computed from its weak form
// <N(u), g> = -integral of u_j u_k d_k g_j by quadrature on the polar grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "sbesov/errors.hpp"
#include "sbesov/format.hpp"
#include "sbesov/spectral_basis.hpp"

namespace sbesov {

/// How aliasing is policed: N(u) is recomputed for `probes` seeded modes on a grid
/// refined by `refine` in both directions, and must agree to `tolerance` relative.
struct DealiasPolicy {
  double refine = 1.5;
  int probes = 3;
  double tolerance = 1e-7;
  std::uint64_t seed = 0x5eed;
};

struct DealiasResult {
  bool pass = true;
  double relative_change = 0.0;
  double margin = std::numeric_limits<double>::infinity();  // tolerance / relative_change
  std::vector<std::size_t> probed;
};

namespace detail {
inline int refined_even(int n, double f) {
  int m = static_cast<int>(std::ceil(n * f));
  return m % 2 ? m + 1 : m;
}

inline GridTensorField outer(const GridVectorField& u) {
  GridTensorField t(u.grid);
  for (std::size_t i = 0; i < u.ux.size(); ++i) {
    t.at(0, 0)[i] = u.ux[i] * u.ux[i];
    t.at(0, 1)[i] = u.ux[i] * u.uy[i];
    t.at(1, 0)[i] = t.at(0, 1)[i];
    t.at(1, 1)[i] = u.uy[i] * u.uy[i];
  }
  return t;
}
}  // namespace detail

class NonlinearWorkspace {
 public:
  NonlinearWorkspace(BasisPtr basis, GridPtr grid, DealiasPolicy policy = {})
      : coarse_(basis, grid),
        fine_(basis, build_grid(detail::refined_even(grid->radial_count(), policy.refine),
                                detail::refined_even(grid->angular_count(), policy.refine))),
        policy_(policy) {
    if (policy.refine <= 1.0 || policy.probes < 1 || !(policy.tolerance > 0.0)) throw ArgumentError("invalid dealiasing policy");
    // |J_m| <= 1 and |e^{i m theta}| = 1, so the summed ladder coefficients of
    // d_x u_x + d_y u_y bound the divergence of every mode at every point.
    for (const auto& m : basis->modes()) {
      const auto a = mode_pieces(m, Quantity::dx_ux);
      const auto b = mode_pieces(m, Quantity::dy_uy);
      double s = 0.0;
      for (std::size_t o = 0; o < a.size(); ++o) s += std::abs(a[o] + b[o]);
      divergence_bound_ = std::max(divergence_bound_, s);
    }
  }

  const BasisPtr& basis() const { return coarse_.basis(); }
  const GridPtr& grid() const { return coarse_.grid(); }
  const SpectralTransform& transform() const { return coarse_; }
  const SpectralTransform& fine_transform() const { return fine_; }
  const DealiasPolicy& policy() const { return policy_; }
  double divergence_bound() const { return divergence_bound_; }

  /// Weak-form coefficients on the given transform, without the aliasing check.
  static std::vector<double> weak_form(const SpectralField& u, const SpectralTransform& tr, std::span<const std::size_t> modes = {}) {
    auto c = tr.contract_gradients(detail::outer(tr.synthesize(u)), modes);
    for (double& x : c) x = -x;
    return c;
  }

 private:
  SpectralTransform coarse_;
  SpectralTransform fine_;
  DealiasPolicy policy_;
  double divergence_bound_ = 0.0;
};

/// N(u) without the aliasing check, for inner loops whose data were checked once.
inline SpectralField nonlinear_unchecked(const SpectralField& u, const NonlinearWorkspace& ws) {
  if (u.basis != ws.basis() && !(u.basis && *u.basis == *ws.basis())) throw ArgumentError("field does not match the workspace basis");
  return SpectralField(ws.basis(), NonlinearWorkspace::weak_form(u, ws.transform()));
}

namespace detail {
inline DealiasResult compare_probes(const SpectralField& u, const std::vector<double>& coarse, const NonlinearWorkspace& ws) {
  DealiasResult r;
  const std::size_t n = ws.basis()->size();
  std::mt19937_64 rng(ws.policy().seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(ws.policy().probes), n);
  while (r.probed.size() < want) {
    const std::size_t i = pick(rng);
    if (std::find(r.probed.begin(), r.probed.end(), i) == r.probed.end()) r.probed.push_back(i);
  }
  // Relative to the largest coefficient, floored by ||u||^2 so that fields with an
  // exactly vanishing N (swirls) are not judged on roundoff alone.
  double scale = 0.0;
  for (double c : coarse) scale = std::max(scale, std::abs(c));
  const double energy = coefficient_dot(u, u);
  if (energy == 0.0) return r;
  scale = std::max(scale, energy);
  const auto fine = NonlinearWorkspace::weak_form(u, ws.fine_transform(), r.probed);
  for (std::size_t i : r.probed) r.relative_change = std::max(r.relative_change, std::abs(fine[i] - coarse[i]) / scale);
  r.pass = r.relative_change <= ws.policy().tolerance;
  r.margin = r.relative_change > 0.0 ? ws.policy().tolerance / r.relative_change : std::numeric_limits<double>::infinity();
  return r;
}
}  // namespace detail

inline DealiasResult dealiasing_check(const SpectralField& u, const NonlinearWorkspace& ws) {
  return detail::compare_probes(u, nonlinear_unchecked(u, ws).coeffs, ws);
}

/// Coefficients N_m = -sum_nodes w sum_{j,k} u_j u_k d_k (e_m)_j. Throws ResolutionError
/// when the grid fails the aliasing check for this u.
inline SpectralField nonlinear_coeffs(const SpectralField& u, const NonlinearWorkspace& ws) {
  auto n = nonlinear_unchecked(u, ws);
  const auto check = detail::compare_probes(u, n.coeffs, ws);
  if (!check.pass) {
    throw ResolutionError("nonlinear term is aliased on the " + std::to_string(ws.grid()->radial_count()) + "x" +
                          std::to_string(ws.grid()->angular_count()) + " grid (relative change " + fmt17(check.relative_change) +
                          " on refinement); use a finer grid");
  }
  return n;
}

/// Strong form: integral of ((u . grad) u) . e_m by quadrature. Equal to the weak form
/// for u in the span, since u . nu = 0 on the rim and div u = 0.
inline SpectralField convection_strong(const SpectralField& u, const SpectralTransform& tr) {
  const auto v = tr.synthesize(u);
  const auto g = tr.gradient(u);
  std::vector<double> ax(v.ux.size());
  std::vector<double> ay(v.ux.size());
  for (std::size_t i = 0; i < ax.size(); ++i) {
    ax[i] = v.ux[i] * g.at(0, 0)[i] + v.uy[i] * g.at(0, 1)[i];
    ay[i] = v.ux[i] * g.at(1, 0)[i] + v.uy[i] * g.at(1, 1)[i];
  }
  GridVectorField a(tr.grid());
  a.ux = std::move(ax);
  a.uy = std::move(ay);
  return tr.analyze(a);
}

struct HelmholtzSplit {
  SpectralField projection;
  GridVectorField remainder;  // the gradient part v - P v
};

inline HelmholtzSplit helmholtz_project(const GridVectorField& v, const SpectralTransform& tr) {
  HelmholtzSplit out{tr.analyze(v), v};
  const auto pv = tr.synthesize(out.projection);
  for (std::size_t i = 0; i < v.ux.size(); ++i) {
    out.remainder.ux[i] -= pv.ux[i];
    out.remainder.uy[i] -= pv.uy[i];
  }
  return out;
}

inline HelmholtzSplit helmholtz_project(const GridVectorField& v, const BasisPtr& basis, const GridPtr& grid) {
  return helmholtz_project(v, SpectralTransform(basis, grid));
}

/// Quadrature L2 norm squared of grid data.
inline double grid_l2_squared(const GridVectorField& v) {
  const auto& w = v.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * (v.ux[i] * v.ux[i] + v.uy[i] * v.uy[i]);
  return s;
}

struct EnergyResidual {
  double transport = 0.0;    // |<N(u), u>|
  double dissipation = 0.0;  // |<Au, u> - ||curl u||^2|
};

/// The two pieces of d/dt (1/2)||u||^2 = -||curl u||^2: the transport term vanishes and
/// the Stokes form equals the enstrophy.
inline EnergyResidual energy_identity_residual(const SpectralField& u, const NonlinearWorkspace& ws) {
  EnergyResidual r;
  r.transport = std::abs(coefficient_dot(nonlinear_unchecked(u, ws), u));
  double stokes = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) stokes += u.basis->mode(i).lambda * u.coeffs[i] * u.coeffs[i];
  const auto curl = ws.transform().synthesize_quantity(u, Quantity::curl);
  const auto& w = ws.grid()->weights();
  double enstrophy = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) enstrophy += w[i] * curl[i] * curl[i];
  r.dissipation = std::abs(stokes - enstrophy);
  return r;
}

}  // namespace sbesov
