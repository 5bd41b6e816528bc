#pragma once

// Initial data for runs, and the singular swirl family used for the embedding experiment.

#include <cmath>
#include <vector>

#include <json.hpp>

#include "sbesov/besov.hpp"
#include "sbesov/config.hpp"
#include "sbesov/errors.hpp"
#include "sbesov/littlewood_paley.hpp"
#include "sbesov/samples.hpp"
#include "sbesov/spectral_basis.hpp"

namespace sbesov {

/// The coarsest node spacing of a grid: the larger of the radial gap and the rim arc.
inline double grid_spacing(const PolarGrid& g) { return std::max(g.max_radial_spacing(), g.dtheta()); }

/// Cutoff: 0 on [0, 1/2], 1 on [1, inf), smooth and increasing between.
inline double bump_cutoff(double s) { return 1.0 - eta(2.0 * s); }

/// Grid samples of chi(|x - x0|/h) (x - x0)^perp / |x - x0|^2, a point vortex with its
/// core removed at scale h; |u| ~ |x - x0|^-1 outside the core.
inline GridVectorField bump_profile(const GridPtr& grid, double x0, double y0, double h) {
  if (!(h >= 3.0 * grid_spacing(*grid))) {
    throw ResolutionError("bump width h = " + fmt17(h) + " is below 3 grid spacings (" + fmt17(3.0 * grid_spacing(*grid)) +
                          "); refine the grid");
  }
  GridVectorField v(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double dx = grid->x(i) - x0;
    const double dy = grid->y(i) - y0;
    const double r2 = dx * dx + dy * dy;
    const double c = bump_cutoff(std::sqrt(r2) / h);
    if (c == 0.0) continue;
    v.ux[i] = -c * dy / r2;
    v.uy[i] = c * dx / r2;
  }
  return v;
}

inline std::size_t require_mode(const Basis& b, const ModeRef& m) {
  const auto i = b.find(m.n, m.parity, m.k);
  if (!i) {
    throw ArgumentError("mode (" + std::to_string(m.n) + ", " + to_string(m.parity) + ", " + std::to_string(m.k) +
                        ") is not in the basis");
  }
  return *i;
}

inline SpectralField generate_data(const DataGeneratorSpec& spec, const BasisPtr& basis, const SpectralTransform& tr) {
  SpectralField f(basis);
  switch (spec.kind) {
    case DataKind::single_mode:
      f.coeffs[require_mode(*basis, spec.modes.front())] = 1.0;
      break;
    case DataKind::mode_sum:
      for (const auto& m : spec.modes) f.coeffs[require_mode(*basis, m)] += 1.0;
      f *= 1.0 / coefficient_l2(f);
      break;
    case DataKind::band_random:
      f = band_random(basis, spec.j, spec.seed);
      break;
    case DataKind::spectral_slope:
      f = spectral_slope(basis, spec.slope, spec.seed);
      break;
    case DataKind::bump_family:
      f = tr.analyze(bump_profile(tr.grid(), spec.x0, spec.y0, spec.h));
      break;
  }
  return spec.amplitude * f;
}

/// sup over thresholds s = 2^k, |k| <= 40, of s |{|u| > s}|^{1/2}, with the measure taken
/// by grid quadrature. A stand-in for the weak-L^2 quasi-norm.
inline double weak_l2_proxy(const GridVectorField& v) {
  const auto& w = v.grid->weights();
  std::vector<double> mag(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) mag[i] = std::hypot(v.ux[i], v.uy[i]);
  double best = 0.0;
  for (int k = -40; k <= 40; ++k) {
    const double s = std::ldexp(1.0, k);
    double area = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (mag[i] > s) area += w[i];
    }
    best = std::max(best, s * std::sqrt(area));
  }
  return best;
}

struct EmbeddingRow {
  double h = 0.0;
  double lp = 0.0;
  double weak_l2 = 0.0;
  double besov = 0.0;
};

struct EmbeddingReport {
  double p = 4.0;
  std::vector<EmbeddingRow> rows;
  double besov_spread = 0.0;  // max/min over widths
  double lp_spread = 0.0;
  double weak_spread = 0.0;

  std::string to_csv() const {
    std::string s = "h,lp_norm,weak_l2_proxy,besov_crit_norm\n";
    for (const auto& r : rows) s += fmt17(r.h) + "," + fmt17(r.lp) + "," + fmt17(r.weak_l2) + "," + fmt17(r.besov) + "\n";
    return s;
  }

  nlohmann::ordered_json summary() const {
    nlohmann::ordered_json j;
    j["format"] = "stokes-besov-embed/1";
    j["p"] = p;
    j["besov_spread"] = besov_spread;
    j["lp_spread"] = lp_spread;
    j["weak_l2_spread"] = weak_spread;
    return j;
  }
};

/// For each width: ||u_h||_{L^p}, the weak-L^2 proxy and ||u_h||_{B^{-1+2/p}_{p,inf}} of
/// the projected swirl centred at (x0, y0).
inline EmbeddingReport embedding_experiment(double p, const std::vector<double>& widths, const NormContext& ctx, double x0 = 0.0,
                                            double y0 = 0.0) {
  require_supercritical(p, 2);
  EmbeddingReport rep;
  rep.p = p;
  const BesovIndex idx{critical_s(p, 2), p, Exponent::infinity()};
  for (double h : widths) {
    const auto u = ctx.transform().analyze(bump_profile(ctx.grid(), x0, y0, h));
    EmbeddingRow row;
    row.h = h;
    row.lp = ctx.lp(u, p);
    row.weak_l2 = weak_l2_proxy(ctx.transform().synthesize(u));
    row.besov = ctx.besov(u, idx).aggregate;
    rep.rows.push_back(row);
  }
  const auto spread = [&](auto get) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& r : rep.rows) {
      lo = std::min(lo, get(r));
      hi = std::max(hi, get(r));
    }
    return hi / lo;
  };
  rep.besov_spread = spread([](const EmbeddingRow& r) { return r.besov; });
  rep.lp_spread = spread([](const EmbeddingRow& r) { return r.lp; });
  rep.weak_spread = spread([](const EmbeddingRow& r) { return r.weak_l2; });
  return rep;
}

}  // namespace sbesov
