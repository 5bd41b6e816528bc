#pragma once

// L^p norms by quadrature, homogeneous Besov norms from dyadic blocks, the
// Phi-pairing, the solution-space norm Y and the tail functional for the data.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbesov/errors.hpp"
#include "sbesov/format.hpp"
#include "sbesov/littlewood_paley.hpp"
#include "sbesov/spectral_basis.hpp"
#include "sbesov/trajectory.hpp"

namespace sbesov {

/// An integrability exponent in [1, inf]. Infinity is its own state, never a large number.
class Exponent {
 public:
  Exponent(double v) : value_(v), infinite_(false) {  // NOLINT: implicit from finite reals
    if (!(v >= 1.0) || !std::isfinite(v)) throw ArgumentError("exponent must be a finite real >= 1, or infinity");
  }
  static constexpr Exponent infinity() { return Exponent(); }

  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_) throw ArgumentError("value() of an infinite exponent");
    return value_;
  }
  /// 1/p, with 1/inf = 0.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }
  /// Holder conjugate p'.
  Exponent conjugate() const {
    if (infinite_) return Exponent(1.0);
    if (value_ == 1.0) return infinity();
    return Exponent(value_ / (value_ - 1.0));
  }
  std::string str() const;

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  constexpr Exponent() : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

inline std::string Exponent::str() const {
  return infinite_ ? "inf" : fmt17(value_);
}

/// Accepts "inf", "infinity" or a real >= 1.
inline Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return Exponent::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ArgumentError("not an exponent: '" + text + "'");
  }
  if (used != text.size()) throw ArgumentError("not an exponent: '" + text + "'");
  return Exponent(v);
}

struct BesovIndex {
  double s = 0.0;
  Exponent p = 2.0;
  Exponent q = 2.0;
};

/// l^q norm of a finite sequence (sup for q = inf).
inline double lq_aggregate(const std::vector<double>& v, Exponent q) {
  if (q.is_infinite()) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  const double e = q.value();
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), e);
  return std::pow(s, 1.0 / e);
}

/// L^p norm of a nonnegative pointwise magnitude sampled on a grid.
inline double lp_of_magnitude(const PolarGrid& grid, const std::vector<double>& mag, Exponent p) {
  if (p.is_infinite()) {
    double m = 0.0;
    for (double v : mag) m = std::max(m, v);
    return m;
  }
  const double e = p.value();
  const auto& w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (mag[i] > 0.0) s += w[i] * (e == 2.0 ? mag[i] * mag[i] : std::pow(mag[i], e));
  }
  return std::pow(s, 1.0 / e);
}

/// L^p norm of grid samples. For p = inf this is the max over the field's own nodes;
/// spectral fields get a refined evaluation through NormContext::lp.
inline double lp_norm(const GridVectorField& v, Exponent p) {
  std::vector<double> mag(v.ux.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(v.ux[i], v.uy[i]);
  return lp_of_magnitude(*v.grid, mag, p);
}

/// L^p norm of the Frobenius magnitude of a gradient tensor.
inline double lp_norm(const GridTensorField& g, Exponent p) {
  std::vector<double> mag(g.comp[0].size());
  for (std::size_t i = 0; i < mag.size(); ++i) {
    double s = 0.0;
    for (const auto& c : g.comp) s += c[i] * c[i];
    mag[i] = std::sqrt(s);
  }
  return lp_of_magnitude(*g.grid, mag, p);
}

struct NormReport {
  BesovIndex index;
  std::vector<std::pair<int, double>> bands;  // (j, 2^{js} ||phi_j f||_{L^p})
  double aggregate = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& [j, v] : bands) b.push_back({{"j", j}, {"value", v}});
    return {{"format", "stokes-besov-norm/1"},
            {"s", index.s},
            {"p", index.p.str()},
            {"q", index.q.str()},
            {"bands", b},
            {"aggregate", aggregate}};
  }
};

/// Basis, quadrature grid and transforms used to measure norms of spectral fields.
/// The refined transform for L^inf is built on first use.
class NormContext {
 public:
  NormContext(BasisPtr basis, GridPtr grid, int linf_refinement = 3)
      : transform_(std::make_shared<SpectralTransform>(basis, grid)), refinement_(linf_refinement) {
    if (linf_refinement < 1) throw ArgumentError("L^inf refinement factor must be >= 1");
    bands_ = active_bands(*basis);
  }

  const BasisPtr& basis() const { return transform_->basis(); }
  const GridPtr& grid() const { return transform_->grid(); }
  const SpectralTransform& transform() const { return *transform_; }
  BandRange bands() const { return bands_; }
  int linf_refinement() const { return refinement_; }

  const SpectralTransform& refined() const {
    std::call_once(refined_once_, [this] {
      if (refinement_ == 1) {
        refined_ = transform_;
      } else {
        const auto& g = *grid();
        refined_ = std::make_shared<SpectralTransform>(
            basis(), build_grid(g.radial_count() * refinement_, g.angular_count() * refinement_));
      }
    });
    return *refined_;
  }

  double lp(const SpectralField& f, Exponent p) const {
    check(f);
    if (p.is_infinite()) return lp_norm(refined().synthesize(f), p);
    return lp_norm(transform_->synthesize(f), p);
  }

  /// ||grad f||_{L^p}, Frobenius magnitude pointwise.
  double gradient_lp(const SpectralField& f, Exponent p) const {
    check(f);
    return lp_norm((p.is_infinite() ? refined() : *transform_).gradient(f), p);
  }

  /// ||phi_j(sqrt A) f||_{L^p} for every active band, in order j_lo..j_hi.
  std::vector<double> band_lp(const SpectralField& f, Exponent p) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(bands_.count()));
    for (int j = bands_.j_lo; j <= bands_.j_hi; ++j) out.push_back(lp(apply_band(f, j), p));
    return out;
  }

  NormReport besov(const SpectralField& f, const BesovIndex& idx) const {
    NormReport r;
    r.index = idx;
    const auto raw = band_lp(f, idx.p);
    std::vector<double> weighted;
    for (int j = bands_.j_lo; j <= bands_.j_hi; ++j) {
      const double v = std::exp2(j * idx.s) * raw[static_cast<std::size_t>(j - bands_.j_lo)];
      r.bands.emplace_back(j, v);
      weighted.push_back(v);
    }
    r.aggregate = lq_aggregate(weighted, idx.q);
    return r;
  }

  /// sum_j integral of phi_j(sqrt A) f . Phi_j(sqrt A) g, by quadrature band by band.
  double dual_pairing(const SpectralField& f, const SpectralField& g) const {
    check(f);
    check(g);
    const auto& w = grid()->weights();
    double total = 0.0;
    for (int j = bands_.j_lo; j <= bands_.j_hi; ++j) {
      const auto a = transform_->synthesize(apply_band(f, j));
      const auto b = transform_->synthesize(apply_wide_band(g, j));
      double s = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * (a.ux[i] * b.ux[i] + a.uy[i] * b.uy[i]);
      total += s;
    }
    return total;
  }

 private:
  void check(const SpectralField& f) const {
    if (!f.basis || f.size() != basis()->size()) throw ArgumentError("field does not belong to this basis");
  }

  std::shared_ptr<const SpectralTransform> transform_;
  int refinement_;
  BandRange bands_;
  mutable std::once_flag refined_once_;
  mutable std::shared_ptr<const SpectralTransform> refined_;
};

/// Critical regularity -1 + d/p.
inline double critical_s(double p, int d) { return -1.0 + d / p; }

inline void require_supercritical(double p, int d) {
  if (!(p > d) || !std::isfinite(p)) throw ArgumentError("need d < p < ∞ (got p = " + std::to_string(p) + ", d = " + std::to_string(d) + ")");
}

struct YNorm {
  double besov_sup = 0.0;    // sup_t ||u(t)||_{B^{-1+d/p}_{p,inf}}
  double weighted_sup = 0.0; // sup_t t^{(1-d/p)/2} ||u(t)||_{L^p}
  double total() const { return besov_sup + weighted_sup; }
};

/// Discrete Y-norm over the stored times t > 0.
inline YNorm y_norm(const Trajectory& traj, double p, int d, const NormContext& ctx) {
  require_supercritical(p, d);
  YNorm y;
  const BesovIndex idx{critical_s(p, d), p, Exponent::infinity()};
  const double alpha = 0.5 * (1.0 - d / p);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    if (!(t > 0.0)) continue;
    y.besov_sup = std::max(y.besov_sup, ctx.besov(traj.fields[i], idx).aggregate);
    y.weighted_sup = std::max(y.weighted_sup, std::pow(t, alpha) * ctx.lp(traj.fields[i], p));
  }
  return y;
}

struct TailReport {
  double value = 0.0;
  bool truncated = false;  // J lies above the highest active band
};

/// sup_{j >= J} 2^{(-1+d/p) j} ||phi_j(sqrt A) u0||_{L^p}.
inline TailReport tail_smallness(const SpectralField& u0, double p, int d, int J, const NormContext& ctx) {
  require_supercritical(p, d);
  TailReport r;
  const auto range = ctx.bands();
  if (J > range.j_hi) {
    r.truncated = true;
    return r;
  }
  const double s = critical_s(p, d);
  for (int j = std::max(J, range.j_lo); j <= range.j_hi; ++j) {
    r.value = std::max(r.value, std::exp2(j * s) * ctx.lp(apply_band(u0, j), p));
  }
  return r;
}

}  // namespace sbesov
