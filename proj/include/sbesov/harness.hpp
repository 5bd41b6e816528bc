#pragma once

// The verification suite: named check groups run at the configured truncation, each
// producing rows (check id, measured value, threshold, pass).

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbesov/basis_io.hpp"
#include "sbesov/besov.hpp"
#include "sbesov/config.hpp"
#include "sbesov/format.hpp"
#include "sbesov/generators.hpp"
#include "sbesov/littlewood_paley.hpp"
#include "sbesov/mild_solver.hpp"
#include "sbesov/nonlinear.hpp"
#include "sbesov/samples.hpp"
#include "sbesov/semigroup.hpp"
#include "sbesov/specfun.hpp"

namespace sbesov {

struct CheckResult {
  std::string id;
  double measured = 0.0;
  double threshold = 0.0;
  bool at_most = true;  // pass iff measured <= threshold (else >=)
  bool pass = false;
};

inline CheckResult at_most(std::string id, double measured, double threshold) {
  return {std::move(id), measured, threshold, true, measured <= threshold};
}

inline CheckResult at_least(std::string id, double measured, double threshold) {
  return {std::move(id), measured, threshold, false, measured >= threshold};
}

/// Shared, lazily built state for one verification run.
class CheckEnv {
 public:
  explicit CheckEnv(RunConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.basis_cache.empty()) {
      basis_ = load_basis(cfg_.basis_cache);
      if (basis_->n_max() != cfg_.basis_n() || basis_->k_max() != cfg_.basis_k()) {
        throw ConfigError(0, "basis cache " + cfg_.basis_cache + " holds truncation (" + std::to_string(basis_->n_max()) + ", " +
                                 std::to_string(basis_->k_max()) + "), the config asks for (" + std::to_string(cfg_.basis_n()) + ", " +
                                 std::to_string(cfg_.basis_k()) + ")");
      }
    } else {
      basis_ = build_basis(cfg_.basis_n(), cfg_.basis_k());
    }
    grid_ = build_grid(cfg_.grid_radial(), cfg_.grid_angular());
    ctx_ = std::make_unique<NormContext>(basis_, grid_);
  }

  const RunConfig& config() const { return cfg_; }
  const BasisPtr& basis() const { return basis_; }
  const GridPtr& grid() const { return grid_; }
  const NormContext& ctx() const { return *ctx_; }

  const NonlinearWorkspace& workspace() const {
    std::call_once(ws_once_, [&] { ws_ = std::make_unique<NonlinearWorkspace>(basis_, grid_); });
    return *ws_;
  }

  /// The same experiment at half the truncation, for drift measurements.
  const NormContext& half_ctx() const {
    std::call_once(half_once_, [&] {
      const int n = std::max(1, basis_->n_max() / 2);
      const int k = std::max(1, basis_->k_max() / 2);
      half_ = std::make_unique<NormContext>(build_basis(n, k), build_grid(std::max(8, grid_->radial_count() / 2),
                                                                           std::max(8, grid_->angular_count() / 2)));
    });
    return *half_;
  }

 private:
  RunConfig cfg_;
  BasisPtr basis_;
  GridPtr grid_;
  std::unique_ptr<NormContext> ctx_;
  mutable std::once_flag ws_once_;
  mutable std::unique_ptr<NonlinearWorkspace> ws_;
  mutable std::once_flag half_once_;
  mutable std::unique_ptr<NormContext> half_;
};

struct CheckGroup {
  std::string id;
  std::string description;
  std::function<std::vector<CheckResult>(const CheckEnv&)> run;
};

inline double relative_drift(double a, double b) { return std::abs(b - a) / std::abs(a); }

/// Integral of t^(a-1) (1-t)^(b-1) over (0,1) for 0 < a, b <= 1, by the substitutions
/// t = u^(1/a) near 0 and 1 - t = v^(1/b) near 1 and Gauss-Legendre on the smooth remainder.
inline double beta_by_quadrature(double a, double b) {
  const auto rule = gauss_legendre(400);
  const auto side = [&](double p, double q) {
    const double top = std::pow(0.5, p);
    double s = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
      const double u = top * rule.nodes[static_cast<std::size_t>(i)];
      s += rule.weights[static_cast<std::size_t>(i)] * std::pow(1.0 - std::pow(u, 1.0 / p), q - 1.0);
    }
    return top * s / p;
  };
  return side(a, b) + side(b, a);
}

namespace checks {

inline std::vector<CheckResult> partition(const CheckEnv& env) {
  const auto& b = env.basis();
  const auto range = active_bands(*b);
  double worst = 0.0;
  for (unsigned seed = 0; seed < 100; ++seed) {
    const auto f = random_field(b, seed);
    SpectralField sum(b);
    for (int j = range.j_lo; j <= range.j_hi; ++j) sum += apply_band(f, j);
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(sum.coeffs[i] - f.coeffs[i]));
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> expo(-3.0, 6.0);
  double unity = 0.0;
  double phi_phi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double lam = std::pow(10.0, expo(rng));
    double s = 0.0;
    for (int j = -40; j <= 40; ++j) s += phi(j, lam);
    unity = std::max(unity, std::abs(s - 1.0));
  }
  for (const auto& m : b->modes()) {
    const double x = std::sqrt(m.lambda);
    for (int j = range.j_lo; j <= range.j_hi; ++j) phi_phi = std::max(phi_phi, std::abs(Phi(j, x) * phi(j, x) - phi(j, x)));
  }
  return {at_most("partition.reconstruction", worst, 1e-13), at_most("partition.unity", unity, 1e-13),
          at_most("partition.wide_band", phi_phi, 0.0)};
}

inline std::vector<CheckResult> orthonormality(const CheckEnv& env) {
  const auto& b = env.basis();
  const auto& tr = env.ctx().transform();
  double off = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < b->size(); ++i) {
    const auto row = tr.analyze(tr.synthesize(SpectralField::unit(b, i)));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k == i) {
        diag = std::max(diag, std::abs(row.coeffs[k] - 1.0));
      } else {
        off = std::max(off, std::abs(row.coeffs[k]));
      }
    }
  }
  return {at_most("orthonormality.off_diagonal", off, 1e-9), at_most("orthonormality.diagonal", diag, 1e-9),
          at_most("orthonormality.grid_self_test", env.grid()->self_test_error(), 1e-13)};
}

inline std::vector<CheckResult> boundary(const CheckEnv& env) {
  const auto& b = env.basis();
  const std::array<Quantity, 3> qs{Quantity::ux, Quantity::uy, Quantity::curl};
  double normal = 0.0;
  double curl = 0.0;
  constexpr int kPoints = 256;
  for (int l = 0; l < kPoints; ++l) {
    const double th = 2.0 * std::numbers::pi * (l + 0.5) / kPoints;
    const double c = std::cos(th);
    const double s = std::sin(th);
    const auto v = mode_values_at(*b, c, s, qs);
    for (std::size_t i = 0; i < b->size(); ++i) {
      normal = std::max(normal, std::abs(v[0][i] * c + v[1][i] * s));
      curl = std::max(curl, std::abs(v[2][i]));
    }
  }
  return {at_most("boundary.normal_trace", normal, 1e-8), at_most("boundary.curl_trace", curl, 1e-8)};
}

inline std::vector<CheckResult> eigenvalues(const CheckEnv& env) {
  const auto& b = env.basis();
  const double j01 = bessel_zero(0, 1);
  double consistency = 0.0;
  double positivity = std::numeric_limits<double>::infinity();
  for (const auto& m : b->modes()) {
    consistency = std::max(consistency, std::abs(m.lambda - m.zero * m.zero) / m.lambda);
    positivity = std::min(positivity, m.lambda);
  }
  return {at_most("eigen.lambda_min_literal", std::abs(b->lambda_min() - 5.783185962946785), 1e-9),
          at_most("eigen.lambda_min_zero_oracle", std::abs(b->lambda_min() - j01 * j01), 1e-9),
          at_most("eigen.lambda_vs_zero", consistency, 1e-13), at_least("eigen.positivity", positivity, 1.0)};
}

inline std::vector<CheckResult> multiplier(const CheckEnv& env) {
  std::vector<CheckResult> out;
  const struct {
    Exponent r, p;
    const char* name;
  } pairs[] = {{2.0, 4.0, "2_4"}, {2.0, Exponent::infinity(), "2_inf"}, {1.0, 2.0, "1_2"}};
  for (const auto& [r, p, name] : pairs) {
    const auto scan_on = [&](const NormContext& ctx) {
      return scan_band_multiplier(r, p, [&](int j) { return multiplier_samples(ctx.basis(), j); }, ctx);
    };
    const auto full = scan_on(env.ctx());
    const auto half = scan_on(env.half_ctx());
    out.push_back(at_most(std::string("multiplier.") + name + ".uniformity", band_uniformity(full), 10.0));
    out.push_back(at_most(std::string("multiplier.") + name + ".drift", relative_drift(half.max_ratio, full.max_ratio), 0.25));
  }
  return out;
}

inline std::vector<CheckResult> smoothing(const CheckEnv& env) {
  const auto& ctx = env.ctx();
  const auto& b = env.basis();
  std::vector<SpectralField> band;
  for (int j = ctx.bands().j_lo; j <= ctx.bands().j_hi; ++j) band.push_back(band_random(b, j, 40 + static_cast<unsigned>(j)));
  const std::vector<SpectralField> wide{random_field(b, 7), random_field(b, 8)};
  const auto ts = log_grid(1.0 / b->lambda_max(), 1.0, 25);
  const double lo = 10.0 / b->lambda_max();
  const double hi = 0.1 / b->lambda_min();
  std::vector<CheckResult> out;
  const struct {
    double s, s0, p, p0;
    const char* name;
  } tuples[] = {{0.0, -0.5, 4.0, 4.0, "0_-0.5_4_4"}, {1.0, 0.0, 2.0, 2.0, "1_0_2_2"}, {0.5, -0.5, 2.0, 4.0, "0.5_-0.5_2_4"},
                {0.0, 0.0, 4.0, 4.0, "0_0_4_4"}};
  for (const auto& t : tuples) {
    const auto slope_scan = scan_smoothing(t.s, t.s0, t.p, t.p0, ts, band, ctx, lo, hi);
    const auto bound_scan = scan_smoothing(t.s, t.s0, t.p, t.p0, ts, wide, ctx, lo, hi);
    const std::string id = std::string("smoothing.") + t.name;
    const double excess = slope_scan.slope - slope_scan.slope_claimed;
    if (slope_scan.slope_claimed == 0.0) {
      out.push_back(at_most(id + ".slope_abs", std::abs(excess), 0.1));
    } else {
      out.push_back(at_least(id + ".slope_excess", excess, -0.1));
    }
    const double m = std::max(slope_scan.max_ratio, bound_scan.max_ratio);
    out.push_back(at_most(id + ".max_ratio", std::isfinite(m) ? m : std::numeric_limits<double>::infinity(), std::numeric_limits<double>::max()));
  }
  // L^4 -> L^inf on concentrated data.
  std::vector<SpectralField> bumps;
  for (double s : log_grid(lo, hi, 8)) bumps.push_back(point_concentrated(b, 0.2, 0.1, 0.0, [s](double lam) { return std::exp(-s * lam); }));
  const auto lp = scan_lp_smoothing(4.0, Exponent::infinity(), ts, bumps, ctx, lo, hi);
  out.push_back(at_least("smoothing.lp_4_inf.slope_excess", lp.slope - lp.slope_claimed, -0.1));
  return out;
}

inline std::vector<CheckResult> semigroup_algebra(const CheckEnv& env) {
  const auto& b = env.basis();
  const auto& ctx = env.ctx();
  const auto f = random_field(b, 3);
  double law = 0.0;
  double contraction = 0.0;
  double commute = 0.0;
  for (double t : {1e-3, 0.05, 0.4}) {
    const auto two = heat_apply(heat_apply(f, 0.5 * t), 0.5 * t);
    const auto one = heat_apply(f, t);
    for (std::size_t i = 0; i < f.size(); ++i) law = std::max(law, std::abs(two.coeffs[i] - one.coeffs[i]) / std::max(1.0, std::abs(f.coeffs[i])));
    contraction = std::max(contraction, coefficient_l2(one) / (std::exp(-t * b->lambda_min()) * coefficient_l2(f)) - 1.0);
    for (int j = ctx.bands().j_lo; j <= ctx.bands().j_hi; ++j) {
      commute = std::max(commute, coefficient_l2(heat_apply(apply_band(f, j), t) - apply_band(one, j)) / coefficient_l2(f));
    }
  }
  const BesovIndex idx{-0.5, 4.0, Exponent::infinity()};
  const auto bounded = scan_besov_bounded(idx, {1e-9 / b->lambda_max()}, {f, band_random(b, 4, 5)}, ctx);
  double near_one = 0.0;
  for (const auto& r : bounded.rows) near_one = std::max(near_one, std::abs(r.ratio - 1.0));
  const auto l2 = scan_besov_bounded({0.0, 2.0, 2.0}, log_grid(1e-4, 1.0, 9), {f}, ctx);
  // Strong continuity on a decreasing t-sequence.
  double prev = std::numeric_limits<double>::infinity();
  double monotone = 0.0;
  for (double t : {0.1, 0.03, 0.01, 0.003, 0.001, 3e-4, 1e-4}) {
    const double d = ctx.besov(heat_apply(f, t) - f, {0.0, 4.0, 2.0}).aggregate;
    monotone = std::max(monotone, d - prev);
    prev = d;
  }
  // Weak-* pairing of a single mode: slope -lambda at t = 0.
  const auto e = SpectralField::unit(b, 2);
  const double pairing = weak_star_continuity(e, e, {1e-7}, ctx).front();
  return {at_most("semigroup.law", law, 1e-14),
          at_most("semigroup.l2_contraction", contraction, 1e-12),
          at_most("semigroup.band_commutation", commute, 1e-15),
          at_most("semigroup.besov_small_t", near_one, 1e-6),
          at_most("semigroup.l2_bounded", l2.max_ratio, 1.0 + 1e-12),
          at_most("semigroup.strong_continuity_increase", monotone, 0.0),
          at_most("semigroup.weak_star_slope", relative_drift(-b->mode(2).lambda, pairing / 1e-7), 1e-5)};
}

inline std::vector<CheckResult> kernel(const CheckEnv& env) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 4>> pairs;
  for (int i = 0; i < 200; ++i) {
    const double r1 = std::sqrt(u(rng)), a1 = 2 * std::numbers::pi * u(rng);
    const double r2 = std::sqrt(u(rng)), a2 = 2 * std::numbers::pi * u(rng);
    pairs.push_back({r1 * std::cos(a1), r1 * std::sin(a1), r2 * std::cos(a2), r2 * std::sin(a2)});
  }
  // Compared against the doubled truncation: the kernel needs no grid, so doubling is cheap.
  const auto doubled = build_basis(2 * env.basis()->n_max(), 2 * env.basis()->k_max());
  const auto ts = log_grid(std::max(0.02, 1.01 * kernel_min_time(*env.basis())), 0.2, 6);
  const double c = fit_gaussian_constant(sample_kernel(*env.basis(), pairs, ts));
  const double ch = fit_gaussian_constant(sample_kernel(*doubled, pairs, ts));
  double sym = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    const auto k = kernel_matrix(p[0], p[1], p[2], p[3], 0.05, *env.basis());
    const auto kt = kernel_matrix(p[2], p[3], p[0], p[1], 0.05, *env.basis());
    sym = std::max({sym, std::abs(k[0] - kt[0]), std::abs(k[1] - kt[2]), std::abs(k[2] - kt[1]), std::abs(k[3] - kt[3])});
  }
  const KernelProbe probe(*env.basis(), 0.1, 0.2);
  const double f1 = frobenius(kernel_matrix(probe, probe, 1.5, *env.basis()));
  const double f2 = frobenius(kernel_matrix(probe, probe, 2.0, *env.basis()));
  const double slope = (std::log(f2) - std::log(f1)) / 0.5;
  return {at_most("kernel.gaussian_constant", c, 50.0), at_most("kernel.gaussian_drift", relative_drift(c, ch), 0.25),
          at_most("kernel.symmetry", sym, 1e-10), at_most("kernel.bottom_decay", std::abs(slope + env.basis()->lambda_min()), 1e-3)};
}

inline std::vector<CheckResult> gradient(const CheckEnv& env) {
  const auto& b = env.basis();
  const auto& ctx = env.ctx();
  const auto ts = log_grid(1e-3, 1.0, 16);
  const auto e = SpectralField::unit(b, 3);
  const double lam = b->mode(3).lambda;
  const auto single = scan_gradient(2.0, ts, {e}, ctx);
  double exact = 0.0;
  for (const auto& r : single.rows) exact = std::max(exact, std::abs(r.ratio - std::sqrt(r.param * (lam - 2.0)) * std::exp(-r.param * lam)));
  const auto rnd = scan_gradient(4.0, ts, {random_field(b, 1), random_field(b, 2)}, ctx);
  // White noise differs between truncations, so drift is measured on smooth concentrated
  // data that describe the same function at both.
  const auto smooth = [](const BasisPtr& basis) {
    std::vector<SpectralField> v;
    for (double s : {5e-3, 2e-2}) v.push_back(point_concentrated(basis, 0.3, -0.2, 0.7, [s](double lam) { return std::exp(-s * lam); }));
    return v;
  };
  const auto sm = scan_gradient(4.0, ts, smooth(b), ctx);
  const auto sm_half = scan_gradient(4.0, ts, smooth(env.half_ctx().basis()), env.half_ctx());
  const auto late = scan_gradient(2.0, {50.0}, {e}, ctx);
  const auto gb = gradient_vs_besov(4.0, {random_field(b, 11), random_field(b, 12)}, ctx);
  const auto gbh = gradient_vs_besov(4.0, {random_field(env.half_ctx().basis(), 11), random_field(env.half_ctx().basis(), 12)},
                                     env.half_ctx());
  const auto gb1 = gradient_vs_besov(2.0, {e}, ctx);
  const double band_ratio = gb1.rows.front().rhs_model / std::sqrt(lam);
  return {at_most("gradient.single_mode_exact", exact, 1e-8),
          at_most("gradient.single_mode_bound", single.max_ratio, 1.0 / std::sqrt(2.0 * std::numbers::e)),
          at_most("gradient.random_max", rnd.max_ratio, 10.0),
          at_most("gradient.smooth_drift", relative_drift(sm_half.max_ratio, sm.max_ratio), 0.25),
          at_most("gradient.late_time", late.max_ratio, 1e-100),
          at_most("gradient.besov_drift", relative_drift(gbh.max_ratio, gb.max_ratio), 0.25),
          at_most("gradient.besov_single_low", 0.5, band_ratio),
          at_most("gradient.besov_single_high", band_ratio, 2.0)};
}

inline std::vector<CheckResult> beta(const CheckEnv&) {
  const double p = 4.0;
  const double d = 2.0;
  const double a = d / p;
  return {at_most("beta.half_half", std::abs(beta_function(0.5, 0.5) - std::numbers::pi), 1e-10),
          at_most("beta.step2_first", std::abs(beta_function(a, 1.0 - a) - beta_by_quadrature(a, 1.0 - a)), 1e-8),
          at_most("beta.step2_second", std::abs(beta_function(a, 0.5 - 0.5 * a) - beta_by_quadrature(a, 0.5 - 0.5 * a)), 1e-8)};
}

inline std::vector<CheckResult> nonlinear(const CheckEnv& env) {
  const auto& ws = env.workspace();
  const auto& b = env.basis();
  double energy = 0.0;
  for (unsigned seed = 0; seed < 100; ++seed) {
    const auto u = lowpass_random(b, seed % 2 ? 0.5 : 1.0 / 3, 500 + seed);
    energy = std::max(energy, std::abs(coefficient_dot(nonlinear_coeffs(u, ws), u)));
  }
  const auto u = lowpass_random(b, 0.5, 11);
  const auto n1 = nonlinear_coeffs(u, ws);
  const auto n3 = nonlinear_coeffs(3.0 * u, ws);
  double scale = 0.0;
  for (double c : n1.coeffs) scale = std::max(scale, std::abs(c));
  double homog = 0.0;
  for (std::size_t i = 0; i < n1.size(); ++i) homog = std::max(homog, std::abs(n3.coeffs[i] - 9.0 * n1.coeffs[i]) / (9.0 * scale));
  double weak_strong = 0.0;
  for (unsigned seed = 0; seed < 3; ++seed) {
    const auto v = lowpass_random(b, 0.5, 900 + seed);
    const auto w = nonlinear_coeffs(v, ws);
    const auto s = convection_strong(v, ws.transform());
    double m = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m = std::max(m, std::abs(w.coeffs[i]));
      d = std::max(d, std::abs(w.coeffs[i] - s.coeffs[i]));
    }
    weak_strong = std::max(weak_strong, d / m);
  }
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  GridVectorField v(env.grid());
  for (std::size_t i = 0; i < v.ux.size(); ++i) {
    v.ux[i] = normal(rng);
    v.uy[i] = normal(rng);
  }
  const auto split = helmholtz_project(v, ws.transform());
  const double total = grid_l2_squared(v);
  const double parts = grid_l2_squared(ws.transform().synthesize(split.projection)) + grid_l2_squared(split.remainder);
  const auto swirl = SpectralField::unit(b, 0);
  const auto er = energy_identity_residual(swirl, ws);
  return {at_most("nonlinear.energy_neutral", energy, 1e-9),
          at_most("nonlinear.homogeneity", homog, 1e-12),
          at_most("nonlinear.weak_vs_strong", weak_strong, 1e-7),
          at_most("nonlinear.helmholtz_pythagoras", std::abs(total - parts) / total, 1e-8),
          at_least("nonlinear.dealias_margin", dealiasing_check(lowpass_random(b, 1.0 / 3, 4), ws).margin, 10.0),
          at_most("nonlinear.divergence_bound", ws.divergence_bound(), 1e-9),
          at_most("nonlinear.enstrophy_identity", er.dissipation, 1e-8)};
}

inline SpectralField mode_pair(const BasisPtr& b) {
  DataGeneratorSpec spec;
  spec.kind = DataKind::mode_sum;
  spec.modes = {{1, Parity::cosine, 1}, {2, Parity::sine, 1}};
  return generate_data(spec, b, SpectralTransform(b, build_grid(4, 4)));
}

inline std::vector<CheckResult> mild(const CheckEnv& env) {
  const auto& ws = env.workspace();
  const auto& ctx = env.ctx();
  const auto& b = env.basis();
  SolverConfig cfg;  // p = 4, T = 0.5, M = 64, gamma = 3
  const auto single_data = 1e-3 * SpectralField::unit(b, *b->find(0, Parity::cosine, 1));
  const auto single = picard_solve(single_data, cfg, ws, ctx);
  const double single_ratio = single.report.ratios.empty() ? 0.0 : single.report.ratios.front();

  const auto dir = mode_pair(b);
  std::vector<double> eps{1e-3, 1e-2, 1e-1};
  std::vector<double> ratios;
  double dissip = 0.0;
  PicardResult small;
  for (double e : eps) {
    auto r = picard_solve(e * dir, cfg, ws, ctx);
    ratios.push_back(r.report.ratios.empty() ? 0.0 : r.report.ratios.front());
    for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
      dissip = std::max(dissip, coefficient_l2(r.trajectory.fields[i]) - coefficient_l2(r.trajectory.fields[i - 1]));
    }
    if (e == eps.front()) small = std::move(r);
  }
  const double slope = (std::log(ratios[2]) - std::log(ratios[0])) / (std::log(eps[2]) - std::log(eps[0]));
  const auto at = mild_value_at(small.trajectory, 1e-3 * dir, 0.1, cfg, ws);
  const auto etd = etd_timestep(1e-3 * dir, 1e-3, 100, cfg, ws);
  const double etd_diff = coefficient_l2(etd.trajectory.fields.back() - at) / coefficient_l2(at);

  SolverConfig fine = cfg;
  fine.mesh_count = 128;
  const auto refined = picard_solve(1e-3 * dir, fine, ws, ctx);
  const double mesh_change = coefficient_l2(refined.trajectory.fields.back() - small.trajectory.fields.back()) /
                             coefficient_l2(small.trajectory.fields.back());

  const auto lin = linear_trajectory(lowpass_random(b, 0.5, 21), cfg);
  const auto lin_fine = linear_trajectory(lowpass_random(b, 0.5, 21), fine);
  const double cy = nonlinear_y_constant(lin, cfg, ws, ctx);
  const double cy_fine = nonlinear_y_constant(lin_fine, fine, ws, ctx);

  return {at_least("mild.single_converged", single.report.converged ? 1.0 : 0.0, 1.0),
          at_most("mild.single_contraction", single_ratio, 0.1),
          at_most("mild.single_residual", single.report.final_residual, 10 * cfg.picard_tol),
          at_least("mild.pair_converged", small.report.converged ? 1.0 : 0.0, 1.0),
          at_most("mild.pair_contraction", ratios.front(), 0.1),
          at_most("mild.pair_residual", small.report.final_residual, 10 * cfg.picard_tol),
          at_most("mild.contraction_slope_error", std::abs(slope - 1.0), 0.15),
          at_most("mild.etd_agreement", etd_diff, 1e-6),
          at_most("mild.mesh_convergence", mesh_change, 1e-5),
          at_most("mild.dissipativity", dissip, 1e-15),
          at_most("mild.y_constant_drift", relative_drift(cy, cy_fine), 0.25)};
}

inline std::vector<CheckResult> smallness(const CheckEnv& env) {
  // Bisection at half truncation to keep the suite inside its time budget.
  const auto& ctx = env.half_ctx();
  const NonlinearWorkspace ws(ctx.basis(), ctx.grid());
  const auto dir = mode_pair(ctx.basis());
  SolverConfig cfg;
  cfg.mesh_count = 16;
  const auto a = estimate_delta0(dir, cfg, ws, ctx, 1e-2, 1e4, 12);
  cfg.mesh_count = 32;
  const auto b = estimate_delta0(dir, cfg, ws, ctx, 1e-2, 1e4, 12);
  return {at_most("smallness.delta0_refinement", relative_drift(a.eps, b.eps), 0.2), at_most("smallness.ratio_at_delta0", a.ratio_at_eps, 0.9)};
}

}  // namespace checks

inline const std::vector<CheckGroup>& check_registry() {
  static const std::vector<CheckGroup> groups{
      {"partition", "dyadic partition of unity and band reconstruction", checks::partition},
      {"orthonormality", "Gram matrix of the basis under grid quadrature", checks::orthonormality},
      {"boundary", "u.nu and curl u on the unit circle for every mode", checks::boundary},
      {"eigenvalues", "eigenvalues against the Bessel-zero oracle", checks::eigenvalues},
      {"multiplier", "band multiplier uniformity and truncation drift", checks::multiplier},
      {"smoothing", "semigroup smoothing exponents", checks::smoothing},
      {"semigroup", "semigroup algebra, boundedness and continuity", checks::semigroup_algebra},
      {"kernel", "kernel symmetry and Gaussian upper bound", checks::kernel},
      {"gradient", "gradient smoothing and Besov gradient bound", checks::gradient},
      {"beta", "Beta-function constants of the time integrals", checks::beta},
      {"nonlinear", "structure of the convection term", checks::nonlinear},
      {"mild", "Picard iteration, ETD oracle and mesh convergence", checks::mild},
      {"smallness", "smallness threshold under mesh refinement", checks::smallness},
  };
  return groups;
}

inline const CheckGroup* find_check(const std::string& id) {
  for (const auto& g : check_registry()) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

struct GroupOutcome {
  std::string group;
  std::vector<CheckResult> rows;
  std::string error;  // a refusal raised by the group, reported as a failed row
  double seconds = 0.0;
};

/// Runs the groups, up to `threads` at a time; the outcome order follows `groups`.
inline std::vector<GroupOutcome> run_checks(const CheckEnv& env, const std::vector<const CheckGroup*>& groups, unsigned threads) {
  std::vector<GroupOutcome> out(groups.size());
  const auto one = [&](std::size_t i) {
    auto& o = out[i];
    o.group = groups[i]->id;
    const auto start = std::chrono::steady_clock::now();
    try {
      o.rows = groups[i]->run(env);
    } catch (const std::exception& e) {
      o.error = e.what();
      o.rows.push_back(at_most(o.group + ".completed", 1.0, 0.0));
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  threads = std::max(1u, threads);
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, groups.size()); ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < groups.size();) one(i);
    }));
  }
  for (auto& w : workers) w.get();
  return out;
}

inline std::string checks_csv(const std::vector<CheckResult>& rows) {
  std::string s = "check_id,measured,threshold,pass\n";
  for (const auto& r : rows) s += r.id + "," + fmt17(r.measured) + "," + fmt17(r.threshold) + "," + (r.pass ? "true" : "false") + "\n";
  return s;
}

}  // namespace sbesov
