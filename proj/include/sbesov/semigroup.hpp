#pragma once

// The Stokes semigroup e^{-tA} (diagonal on the eigenbasis), its matrix kernel, and
// scans that measure the smoothing and boundedness estimates it satisfies.
//
// Scans never assert a constant. Each row records a measured left side, the claimed
// right side without its constant, and their ratio; summaries carry the max ratio and a
// log-log slope of the worst-case envelope.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbesov/besov.hpp"
#include "sbesov/errors.hpp"
#include "sbesov/format.hpp"
#include "sbesov/littlewood_paley.hpp"
#include "sbesov/spectral_basis.hpp"

namespace sbesov {

/// e^{-tA} f.
inline SpectralField heat_apply(const SpectralField& f, double t) {
  if (!(t >= 0.0)) throw ArgumentError("heat_apply: t must be nonnegative");
  SpectralField out = f;
  if (t == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out.coeffs[i] *= std::exp(-t * f.basis->mode(i).lambda);
  return out;
}

// ---------------------------------------------------------------------------
// Kernel

inline constexpr double kKernelTailTolerance = 1e-12;

/// Smallest t with exp(-t (lambda_max - lambda_min)) <= 1e-12: below it the truncated
/// sum cannot represent the kernel.
inline double kernel_min_time(const Basis& basis) {
  const double gap = basis.lambda_max() - basis.lambda_min();
  return gap > 0.0 ? -std::log(kKernelTailTolerance) / gap : 0.0;
}

/// Mode velocities at one point, reusable across times.
class KernelProbe {
 public:
  KernelProbe(const Basis& basis, double x, double y) : x_(x), y_(y) {
    if (std::hypot(x, y) > 1.0) throw ArgumentError("kernel point outside the unit disk");
    const std::array<Quantity, 2> qs{Quantity::ux, Quantity::uy};
    auto v = mode_values_at(basis, x, y, qs);
    ux_ = std::move(v[0]);
    uy_ = std::move(v[1]);
  }
  double x() const { return x_; }
  double y() const { return y_; }
  const std::vector<double>& ux() const { return ux_; }
  const std::vector<double>& uy() const { return uy_; }

 private:
  double x_;
  double y_;
  std::vector<double> ux_;
  std::vector<double> uy_;
};

using Matrix2 = std::array<double, 4>;  // row-major: (xx, xy, yx, yy)

inline double frobenius(const Matrix2& m) { return std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]); }

/// K(x, y, t) = sum_m e^{-t lambda_m} e_m(x) (x) e_m(y). Refuses unresolved small t.
inline Matrix2 kernel_matrix(const KernelProbe& at_x, const KernelProbe& at_y, double t, const Basis& basis) {
  const double tmin = kernel_min_time(basis);
  if (!(t > 0.0) || t < tmin) {
    std::ostringstream msg;
    msg << "kernel at t = " << t << " is not resolved by the truncation (tail exp(-t(lambda_max - lambda_min)) > "
        << kKernelTailTolerance << "); minimal admissible t = " << fmt17(tmin);
    throw ResolutionError(msg.str());
  }
  Matrix2 k{};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double e = std::exp(-t * basis.mode(i).lambda);
    k[0] += e * at_x.ux()[i] * at_y.ux()[i];
    k[1] += e * at_x.ux()[i] * at_y.uy()[i];
    k[2] += e * at_x.uy()[i] * at_y.ux()[i];
    k[3] += e * at_x.uy()[i] * at_y.uy()[i];
  }
  return k;
}

inline Matrix2 kernel_matrix(double x1, double y1, double x2, double y2, double t, const Basis& basis) {
  return kernel_matrix(KernelProbe(basis, x1, y1), KernelProbe(basis, x2, y2), t, basis);
}

struct KernelSample {
  double x1, y1, x2, y2, t;
  double frobenius;
  double dist2() const { return (x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2); }
};

/// Smallest C with |K|_F <= C t^{-d/2} exp(-|x-y|^2 / (C t)) on every sample
/// (bisection in log C; +inf if no C <= 1e6 works).
inline double fit_gaussian_constant(const std::vector<KernelSample>& samples, int d = 2) {
  auto feasible = [&](double c) {
    for (const auto& s : samples) {
      if (s.frobenius > c * std::pow(s.t, -0.5 * d) * std::exp(-s.dist2() / (c * s.t))) return false;
    }
    return true;
  };
  double lo = std::log(1e-6);
  double hi = std::log(1e6);
  if (!feasible(std::exp(hi))) return std::numeric_limits<double>::infinity();
  if (feasible(std::exp(lo))) return std::exp(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(std::exp(mid)) ? hi : lo) = mid;
  }
  return std::exp(hi);
}

/// Kernel Frobenius norms at every (pair, t).
inline std::vector<KernelSample> sample_kernel(const Basis& basis, const std::vector<std::array<double, 4>>& pairs,
                                               const std::vector<double>& times) {
  std::vector<KernelSample> out;
  for (const auto& p : pairs) {
    const KernelProbe a(basis, p[0], p[1]);
    const KernelProbe b(basis, p[2], p[3]);
    for (double t : times) out.push_back({p[0], p[1], p[2], p[3], t, frobenius(kernel_matrix(a, b, t, basis))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scans

struct ScanRow {
  double param = 0.0;
  double lhs = 0.0;
  double rhs_model = 0.0;
  double ratio = 0.0;
};

struct EstimateScan {
  std::string name;
  std::string param_name = "t";
  double slope_claimed = 0.0;  // exponent a in the claimed bound lhs <= C param^a ||f||
  std::vector<ScanRow> rows;
  std::size_t skipped = 0;     // degenerate samples (zero norm) left out
  double max_ratio = 0.0;
  // Worst case over samples of lhs / ||f|| per parameter, and its fitted log-log slope
  // over params in [fit_lo, fit_hi].
  std::vector<std::pair<double, double>> envelope;
  double fit_lo = 0.0;
  double fit_hi = std::numeric_limits<double>::infinity();
  double slope = std::numeric_limits<double>::quiet_NaN();

  std::string to_csv() const {
    std::string out = "param,lhs,rhs_model,ratio\n";
    for (const auto& r : rows) out += fmt17(r.param) + "," + fmt17(r.lhs) + "," + fmt17(r.rhs_model) + "," + fmt17(r.ratio) + "\n";
    return out;
  }

  nlohmann::json summary() const {
    nlohmann::json j{{"format", "stokes-besov-scan/1"}, {"name", name},     {"param", param_name},
                     {"max_ratio", max_ratio},          {"skipped", skipped}, {"slope_claimed", slope_claimed}};
    j["slope"] = std::isfinite(slope) ? nlohmann::json(slope) : nlohmann::json(nullptr);
    return j;
  }
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& [x, y] : pts) {
    if (!(x > 0.0) || !(y > 0.0)) continue;
    const double lx = std::log(x);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
}

namespace detail {

// Fills max_ratio, envelope and slope from rows; rhs_model = param^a * norm.
inline void finish_scan(EstimateScan& scan) {
  scan.max_ratio = 0.0;
  scan.envelope.clear();
  for (const auto& r : scan.rows) {
    scan.max_ratio = std::max(scan.max_ratio, r.ratio);
    const double normalized = r.ratio * std::pow(r.param, scan.slope_claimed);
    auto it = std::find_if(scan.envelope.begin(), scan.envelope.end(), [&](const auto& e) { return e.first == r.param; });
    if (it == scan.envelope.end()) scan.envelope.emplace_back(r.param, normalized);
    else it->second = std::max(it->second, normalized);
  }
  std::vector<std::pair<double, double>> window;
  for (const auto& e : scan.envelope) {
    if (e.first >= scan.fit_lo * (1 - 1e-12) && e.first <= scan.fit_hi * (1 + 1e-12)) window.push_back(e);
  }
  scan.slope = loglog_slope(window);
}

// Generic time scan: lhs(t, f) against t^a * norm(f).
inline EstimateScan time_scan(std::string name, double exponent, const std::vector<double>& ts,
                              const std::vector<SpectralField>& samples,
                              const std::function<double(const SpectralField&)>& norm,
                              const std::function<double(const SpectralField&, double)>& lhs) {
  EstimateScan scan;
  scan.name = std::move(name);
  scan.slope_claimed = exponent;
  for (double t : ts) {
    if (!(t > 0.0)) throw ArgumentError("scan times must be positive");
  }
  for (const auto& f : samples) {
    const double n = norm(f);
    if (!(n > 0.0)) {
      ++scan.skipped;
      continue;
    }
    for (double t : ts) {
      const double l = lhs(f, t);
      const double model = std::pow(t, exponent) * n;
      scan.rows.push_back({t, l, model, l / model});
    }
  }
  return scan;
}

}  // namespace detail

/// ||e^{-tA} f||_{B^s_{p,q}} against ||f||_{B^s_{p,q}}.
inline EstimateScan scan_besov_bounded(const BesovIndex& idx, const std::vector<double>& ts,
                                       const std::vector<SpectralField>& samples, const NormContext& ctx) {
  auto scan = detail::time_scan(
      "besov_bounded", 0.0, ts, samples, [&](const SpectralField& f) { return ctx.besov(f, idx).aggregate; },
      [&](const SpectralField& f, double t) { return ctx.besov(heat_apply(f, t), idx).aggregate; });
  detail::finish_scan(scan);
  return scan;
}

/// Claimed exponent -(s - s0)/2 - (d/2)(1/p - 1/p0) of the smoothing estimate.
inline double smoothing_exponent(double s, double s0, Exponent p, Exponent p0, int d = 2) {
  return -(s - s0) / 2.0 - 0.5 * d * (p.reciprocal() - p0.reciprocal());
}

/// ||e^{-tA} f||_{B^s_{p,1}} against t^a ||f||_{B^{s0}_{p0,inf}}, taken literally with
/// s >= s0 and p <= p0. The slope is fitted over [fit_lo, fit_hi].
inline EstimateScan scan_smoothing(double s, double s0, Exponent p, Exponent p0, const std::vector<double>& ts,
                                   const std::vector<SpectralField>& samples, const NormContext& ctx, double fit_lo,
                                   double fit_hi, int d = 2) {
  if (s < s0) throw ArgumentError("scan_smoothing: need s >= s0");
  if (p0.reciprocal() > p.reciprocal()) throw ArgumentError("scan_smoothing: need p <= p0");
  if (s - s0 - d * (p.reciprocal() - p0.reciprocal()) < 0.0) {
    throw ArgumentError("scan_smoothing: s - s0 - d(1/p - 1/p0) must be nonnegative");
  }
  const double a = smoothing_exponent(s, s0, p, p0, d);
  const BesovIndex left{s, p, 1.0};
  const BesovIndex right{s0, p0, Exponent::infinity()};
  auto scan = detail::time_scan(
      "smoothing", a, ts, samples, [&](const SpectralField& f) { return ctx.besov(f, right).aggregate; },
      [&](const SpectralField& f, double t) { return ctx.besov(heat_apply(f, t), left).aggregate; });
  scan.fit_lo = fit_lo;
  scan.fit_hi = fit_hi;
  detail::finish_scan(scan);
  return scan;
}

/// ||e^{-tA} f||_{L^p} against t^{-(d/2)(1/r - 1/p)} ||f||_{L^r}.
inline EstimateScan scan_lp_smoothing(Exponent r, Exponent p, const std::vector<double>& ts,
                                      const std::vector<SpectralField>& samples, const NormContext& ctx, double fit_lo,
                                      double fit_hi, int d = 2) {
  const double a = -0.5 * d * (r.reciprocal() - p.reciprocal());
  auto scan = detail::time_scan(
      "lp_smoothing", a, ts, samples, [&](const SpectralField& f) { return ctx.lp(f, r); },
      [&](const SpectralField& f, double t) { return ctx.lp(heat_apply(f, t), p); });
  scan.fit_lo = fit_lo;
  scan.fit_hi = fit_hi;
  detail::finish_scan(scan);
  return scan;
}

/// t^{1/2} ||grad e^{-tA} f||_{L^p} / ||f||_{L^p}, 1 < p < inf.
inline EstimateScan scan_gradient(double p, const std::vector<double>& ts, const std::vector<SpectralField>& samples,
                                  const NormContext& ctx) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("scan_gradient: need 1 < p < inf");
  auto scan = detail::time_scan(
      "gradient", -0.5, ts, samples, [&](const SpectralField& f) { return ctx.lp(f, p); },
      [&](const SpectralField& f, double t) { return ctx.gradient_lp(heat_apply(f, t), p); });
  detail::finish_scan(scan);
  return scan;
}

/// ||grad f||_{L^p} against ||f||_{B^1_{p,1}}; the parameter is the sample index.
inline EstimateScan gradient_vs_besov(double p, const std::vector<SpectralField>& samples, const NormContext& ctx) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("gradient_vs_besov: need 1 < p < inf");
  EstimateScan scan;
  scan.name = "gradient_vs_besov";
  scan.param_name = "sample";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double rhs = ctx.besov(samples[i], {1.0, p, 1.0}).aggregate;
    const double lhs = ctx.gradient_lp(samples[i], p);
    if (!(rhs > 0.0)) {
      ++scan.skipped;
      continue;
    }
    scan.rows.push_back({static_cast<double>(i), lhs, rhs, lhs / rhs});
  }
  detail::finish_scan(scan);
  scan.slope = std::numeric_limits<double>::quiet_NaN();
  return scan;
}

/// Band operator ratios ||phi_j u||_{L^p} / (2^{d j (1/r - 1/p)} ||u||_{L^r}); parameter j.
/// `samples_for_band(j)` supplies the test fields for each band.
inline EstimateScan scan_band_multiplier(Exponent r, Exponent p, const std::function<std::vector<SpectralField>(int)>& samples_for_band,
                                         const NormContext& ctx, int d = 2) {
  EstimateScan scan;
  scan.name = "band_multiplier";
  scan.param_name = "j";
  const double gap = r.reciprocal() - p.reciprocal();
  const auto range = ctx.bands();
  for (int j = range.j_lo; j <= range.j_hi; ++j) {
    for (const auto& u : samples_for_band(j)) {
      const double n = ctx.lp(u, r);
      if (!(n > 0.0)) {
        ++scan.skipped;
        continue;
      }
      const double lhs = ctx.lp(apply_band(u, j), p);
      const double model = std::exp2(d * j * gap) * n;
      scan.rows.push_back({static_cast<double>(j), lhs, model, lhs / model});
    }
  }
  detail::finish_scan(scan);
  scan.slope = std::numeric_limits<double>::quiet_NaN();
  return scan;
}

/// max over bands / median over bands of the per-band worst ratio.
inline double band_uniformity(const EstimateScan& scan) {
  std::vector<double> per;
  for (const auto& e : scan.envelope) per.push_back(e.second);
  if (per.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(per.begin(), per.end());
  const std::size_t n = per.size();
  const double median = n % 2 ? per[n / 2] : 0.5 * (per[n / 2 - 1] + per[n / 2]);
  return per.back() / median;
}

/// Pairings sum_j int phi_j(e^{-tA} f - f) . Phi_j g for each t.
inline std::vector<double> weak_star_continuity(const SpectralField& f, const SpectralField& g, const std::vector<double>& ts,
                                                const NormContext& ctx) {
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(ctx.dual_pairing(heat_apply(f, t) - f, g));
  return out;
}

/// n log-spaced points from a to b inclusive.
inline std::vector<double> log_grid(double a, double b, int n) {
  if (!(a > 0.0) || !(b > a) || n < 2) throw ArgumentError("log_grid: need 0 < a < b and n >= 2");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return v;
}

}  // namespace sbesov
