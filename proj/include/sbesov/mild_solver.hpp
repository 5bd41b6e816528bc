#pragma once

// Mild solutions u(t) = e^{-tA} u0 - int_0^t e^{-(t-tau)A} N(u(tau)) dtau by Picard
// iteration on a graded time mesh, plus an exponential time-differencing oracle.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbesov/besov.hpp"
#include "sbesov/errors.hpp"
#include "sbesov/format.hpp"
#include "sbesov/nonlinear.hpp"
#include "sbesov/semigroup.hpp"
#include "sbesov/trajectory.hpp"

namespace sbesov {

struct SolverConfig {
  double p = 4.0;
  Exponent q = Exponent::infinity();  // data norm used when reporting smallness
  int d = 2;
  double T = 0.5;
  int mesh_count = 64;
  double grading = 3.0;
  double picard_tol = 1e-12;
  int max_picard = 50;
  bool nonlinear = true;  // false zeroes N, leaving the Stokes flow

  void validate() const {
    if (d != 2) throw ArgumentError("the shipped basis is two-dimensional (got d = " + std::to_string(d) + ")");
    require_supercritical(p, d);
    if (!(T > 0.0) || !std::isfinite(T)) throw ArgumentError("horizon T must be positive");
    if (mesh_count < 1) throw ArgumentError("mesh_count must be at least 1");
    if (!(grading >= 1.0)) throw ArgumentError("grading exponent must be >= 1");
    if (!(picard_tol > 0.0)) throw ArgumentError("picard_tol must be positive");
    if (max_picard < 1) throw ArgumentError("max_picard must be at least 1");
  }

  /// t_i = T (i/M)^gamma, i = 0..M.
  std::vector<double> mesh() const {
    validate();
    std::vector<double> t(static_cast<std::size_t>(mesh_count) + 1);
    for (int i = 0; i <= mesh_count; ++i) t[static_cast<std::size_t>(i)] = T * std::pow(static_cast<double>(i) / mesh_count, grading);
    t.back() = T;
    return t;
  }
};

// Exponential moments on [0, l] of e^{-lambda rho}: l E1(lambda l) and l^2 E2(lambda l)
// for the weights 1 and rho.
namespace detail {
inline double e1(double z) { return z < 1e-8 ? 1.0 - 0.5 * z : -std::expm1(-z) / z; }

// E2(z) = (1 - e^{-z} - z e^{-z}) / z^2 = sum_k (-z)^k / (k! (k + 2)).
inline double e2(double z) {
  if (z < 0.5) {
    double term = 1.0;
    double s = 0.5;
    for (int k = 1; k < 30; ++k) {
      term *= -z / k;
      s += term / (k + 2);
    }
    return s;
  }
  return (-std::expm1(-z) - z * std::exp(-z)) / (z * z);
}

// ETD2RK weight (z - 1 + e^{-z}) / z^2 = sum_k (-z)^k / (k + 2)! ... times 1.
inline double etd_phi2(double z) {
  if (z < 0.5) {
    double term = 0.5;
    double s = term;
    for (int k = 1; k < 30; ++k) {
      term *= -z / (k + 2);
      s += term;
    }
    return s;
  }
  return (z - 1.0 + std::exp(-z)) / (z * z);
}

/// int_{t0}^{t0 + l} e^{-lambda (t0 + l - tau)} (fa + (fb - fa)(tau - t0)/h) dtau.
inline double cell_integral(double lambda, double l, double h, double fa, double fb) {
  const double z = lambda * l;
  const double slope = (fb - fa) / h;
  return (fa + slope * l) * l * e1(z) - slope * l * l * e2(z);
}

inline void require_mesh(const Trajectory& forcing, const std::vector<double>& mesh, std::size_t upto) {
  if (forcing.size() <= upto || upto >= mesh.size()) throw ArgumentError("forcing does not cover the requested mesh index");
  for (std::size_t i = 0; i <= upto; ++i) {
    if (forcing.times[i] != mesh[i]) throw ArgumentError("forcing is not sampled on the solver mesh");
  }
}
}  // namespace detail

inline Trajectory linear_trajectory(const SpectralField& u0, const SolverConfig& cfg) {
  Trajectory tr;
  tr.provenance = "linear";
  for (double t : cfg.mesh()) tr.push(t, heat_apply(u0, t));
  return tr;
}

/// int_0^{t} e^{-(t - tau)A} F(tau) dtau for the piecewise-linear interpolant of F on
/// the mesh, at t = mesh[t_index]. Each cell is integrated exactly, mode by mode.
inline SpectralField duhamel_apply(const Trajectory& forcing, std::size_t t_index, const SolverConfig& cfg) {
  const auto mesh = cfg.mesh();
  detail::require_mesh(forcing, mesh, t_index);
  const auto& basis = forcing.fields.front().basis;
  SpectralField out(basis);
  const double t = mesh[t_index];
  for (std::size_t c = 0; c < t_index; ++c) {
    const double h = mesh[c + 1] - mesh[c];
    for (std::size_t m = 0; m < out.size(); ++m) {
      const double lam = basis->mode(m).lambda;
      out.coeffs[m] += std::exp(-lam * (t - mesh[c + 1])) *
                       detail::cell_integral(lam, h, h, forcing.fields[c].coeffs[m], forcing.fields[c + 1].coeffs[m]);
    }
  }
  return out;
}

/// The same integral at an arbitrary t in (0, T]; the cell containing t is integrated
/// partially with its own interpolant.
inline SpectralField duhamel_at(const Trajectory& forcing, double t, const SolverConfig& cfg) {
  const auto mesh = cfg.mesh();
  if (!(t >= 0.0) || t > mesh.back()) throw ArgumentError("duhamel_at: t outside [0, T]");
  detail::require_mesh(forcing, mesh, mesh.size() - 1);
  const auto& basis = forcing.fields.front().basis;
  SpectralField out(basis);
  for (std::size_t c = 0; c + 1 < mesh.size() && mesh[c] < t; ++c) {
    const double h = mesh[c + 1] - mesh[c];
    const double end = std::min(t, mesh[c + 1]);
    const double l = end - mesh[c];
    for (std::size_t m = 0; m < out.size(); ++m) {
      const double lam = basis->mode(m).lambda;
      out.coeffs[m] += std::exp(-lam * (t - end)) *
                       detail::cell_integral(lam, l, h, forcing.fields[c].coeffs[m], forcing.fields[c + 1].coeffs[m]);
    }
  }
  return out;
}

/// Duhamel integrals at every mesh point by the recursion D_{i+1} = e^{-hA} D_i + cell_i.
inline std::vector<SpectralField> duhamel_all(const Trajectory& forcing, const SolverConfig& cfg) {
  const auto mesh = cfg.mesh();
  detail::require_mesh(forcing, mesh, mesh.size() - 1);
  const auto& basis = forcing.fields.front().basis;
  std::vector<SpectralField> out;
  out.reserve(mesh.size());
  out.emplace_back(basis);
  for (std::size_t c = 0; c + 1 < mesh.size(); ++c) {
    const double h = mesh[c + 1] - mesh[c];
    SpectralField next(basis);
    for (std::size_t m = 0; m < next.size(); ++m) {
      const double lam = basis->mode(m).lambda;
      next.coeffs[m] = std::exp(-lam * h) * out.back().coeffs[m] +
                       detail::cell_integral(lam, h, h, forcing.fields[c].coeffs[m], forcing.fields[c + 1].coeffs[m]);
    }
    out.push_back(std::move(next));
  }
  return out;
}

inline Trajectory nonlinear_forcing(const Trajectory& u, const NonlinearWorkspace& ws, const SolverConfig& cfg) {
  Trajectory f;
  f.provenance = "N(" + u.provenance + ")";
  for (std::size_t i = 0; i < u.size(); ++i) {
    f.push(u.times[i], cfg.nonlinear ? nonlinear_unchecked(u.fields[i], ws) : SpectralField(u.fields[i].basis));
  }
  return f;
}

inline Trajectory trajectory_difference(const Trajectory& a, const Trajectory& b) {
  Trajectory d;
  for (std::size_t i = 0; i < a.size(); ++i) d.push(a.times[i], a.fields[i] - b.fields[i]);
  return d;
}

struct PicardReport {
  std::vector<double> differences;  // Y-norm of u^{m+1} - u^m
  std::vector<double> ratios;       // differences[m] / differences[m-1]
  double final_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::string dealias;  // outcome of the aliasing check on u0

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["differences"] = differences;
    j["ratios"] = ratios;
    j["final_residual"] = final_residual;
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["diverged"] = diverged;
    j["dealias"] = dealias;
    return j;
  }
};

struct PicardResult {
  Trajectory trajectory;
  PicardReport report;
};

/// Scale used by the stopping rule and the residual: max(1, ||u||_Y).
inline double y_scale(const Trajectory& u, const SolverConfig& cfg, const NormContext& ctx) {
  return std::max(1.0, y_norm(u, cfg.p, cfg.d, ctx).total());
}

/// max_i ||u(t_i) - e^{-t_i A} u0 + D(N(u))(t_i)||_{L2} / max(1, ||u||_Y).
inline double residual(const Trajectory& u, const SpectralField& u0, const SolverConfig& cfg, const NonlinearWorkspace& ws,
                       const NormContext& ctx) {
  const auto d = duhamel_all(nonlinear_forcing(u, ws, cfg), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    worst = std::max(worst, coefficient_l2(u.fields[i] - heat_apply(u0, u.times[i]) + d[i]));
  }
  return worst / y_scale(u, cfg, ctx);
}

/// Picard iteration u^{m+1} = e^{-tA} u0 - D(N(u^m)). Stops when the Y-norm of the
/// update is below picard_tol * max(1, ||u||_Y), after max_picard iterates, or after
/// three consecutive ratios >= 1 (reported as divergence, not thrown).
inline PicardResult picard_solve(const SpectralField& u0, const SolverConfig& cfg, const NonlinearWorkspace& ws, const NormContext& ctx) {
  cfg.validate();
  PicardResult out;
  auto& rep = out.report;
  if (cfg.nonlinear) {
    const auto check = dealiasing_check(u0, ws);
    rep.dealias = "relative change " + fmt17(check.relative_change);
    if (!check.pass) throw ResolutionError("initial data are aliased on this grid: " + rep.dealias);
  }
  const auto linear = linear_trajectory(u0, cfg);
  Trajectory u = linear;
  u.provenance = "picard 0";
  int growing = 0;
  for (int m = 1; m <= cfg.max_picard; ++m) {
    const auto d = duhamel_all(nonlinear_forcing(u, ws, cfg), cfg);
    Trajectory next;
    next.provenance = "picard " + std::to_string(m);
    for (std::size_t i = 0; i < linear.size(); ++i) next.push(linear.times[i], linear.fields[i] - d[i]);
    const double diff = y_norm(trajectory_difference(next, u), cfg.p, cfg.d, ctx).total();
    if (!std::isfinite(diff)) {
      rep.diverged = true;
      rep.iterations = m;
      break;
    }
    if (!rep.differences.empty()) {
      const double prev = rep.differences.back();
      rep.ratios.push_back(prev > 0.0 ? diff / prev : 0.0);
      growing = rep.ratios.back() >= 1.0 ? growing + 1 : 0;
    }
    rep.differences.push_back(diff);
    u = std::move(next);
    rep.iterations = m;
    if (diff <= cfg.picard_tol * y_scale(u, cfg, ctx)) {
      rep.converged = true;
      break;
    }
    if (growing >= 3) {
      rep.diverged = true;
      break;
    }
  }
  rep.final_residual = residual(u, u0, cfg, ws, ctx);
  out.trajectory = std::move(u);
  return out;
}

/// Mild solution at an arbitrary t in [0, T] from a trajectory on the mesh.
inline SpectralField mild_value_at(const Trajectory& u, const SpectralField& u0, double t, const SolverConfig& cfg,
                                   const NonlinearWorkspace& ws) {
  return heat_apply(u0, t) - duhamel_at(nonlinear_forcing(u, ws, cfg), t, cfg);
}

struct EtdResult {
  Trajectory trajectory;
  bool blew_up = false;
  double last_valid_time = 0.0;
};

/// Second-order exponential time differencing (Cox-Matthews ETD2RK) with exact linear
/// propagation, one snapshot per step.
inline EtdResult etd_timestep(const SpectralField& u0, double dt, int steps, const SolverConfig& cfg, const NonlinearWorkspace& ws) {
  if (!(dt > 0.0) || steps < 1) throw ArgumentError("etd_timestep: need dt > 0 and steps >= 1");
  const auto& basis = u0.basis;
  const std::size_t n = u0.size();
  std::vector<double> decay(n), w1(n), w2(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double z = basis->mode(m).lambda * dt;
    decay[m] = std::exp(-z);
    w1[m] = dt * detail::e1(z);
    w2[m] = dt * detail::etd_phi2(z);
  }
  const auto N = [&](const SpectralField& v) { return cfg.nonlinear ? nonlinear_unchecked(v, ws) : SpectralField(basis); };
  EtdResult out;
  out.trajectory.provenance = "etd2rk dt=" + fmt17(dt);
  out.trajectory.push(0.0, u0);
  SpectralField u = u0;
  for (int s = 1; s <= steps; ++s) {
    const auto nu = N(u);
    SpectralField a(basis);
    for (std::size_t m = 0; m < n; ++m) a.coeffs[m] = decay[m] * u.coeffs[m] - w1[m] * nu.coeffs[m];
    const auto na = N(a);
    bool finite = true;
    for (std::size_t m = 0; m < n; ++m) {
      a.coeffs[m] -= w2[m] * (na.coeffs[m] - nu.coeffs[m]);
      finite = finite && std::isfinite(a.coeffs[m]);
    }
    if (!finite) {
      out.blew_up = true;
      break;
    }
    u = std::move(a);
    out.last_valid_time = s * dt;
    out.trajectory.push(out.last_valid_time, u);
  }
  return out;
}

/// First contraction ratio of the Picard map for eps * direction.
inline double first_contraction(const SpectralField& direction, double eps, SolverConfig cfg, const NonlinearWorkspace& ws,
                                const NormContext& ctx) {
  cfg.max_picard = 2;
  cfg.picard_tol = std::numeric_limits<double>::min();
  const auto r = picard_solve(eps * direction, cfg, ws, ctx);
  if (r.report.ratios.empty()) return r.report.diverged ? std::numeric_limits<double>::infinity() : 0.0;
  return r.report.ratios.front();
}

struct SmallnessReport {
  double eps = 0.0;             // largest amplitude found with first ratio < threshold
  double data_norm = 0.0;       // ||eps u0||_{B^{-1+d/p}_{p,q}}
  double ratio_at_eps = 0.0;
  int bisection_steps = 0;
};

/// Amplitude bisection in log eps on [lo, hi] for the first ratio crossing `threshold`.
inline SmallnessReport estimate_delta0(const SpectralField& direction, const SolverConfig& cfg, const NonlinearWorkspace& ws,
                                       const NormContext& ctx, double lo = 1e-3, double hi = 1e3, int steps = 20,
                                       double threshold = 0.9) {
  SmallnessReport rep;
  const auto ratio = [&](double e) { return first_contraction(direction, e, cfg, ws, ctx); };
  if (!(ratio(lo) < threshold)) throw NumericalError("estimate_delta0: the lower amplitude already fails to contract");
  if (ratio(hi) < threshold) {
    rep.eps = hi;
  } else {
    for (int s = 0; s < steps; ++s) {
      const double mid = std::sqrt(lo * hi);
      (ratio(mid) < threshold ? lo : hi) = mid;
      rep.bisection_steps = s + 1;
    }
    rep.eps = lo;
  }
  rep.ratio_at_eps = ratio(rep.eps);
  rep.data_norm = ctx.besov(rep.eps * direction, {critical_s(cfg.p, cfg.d), cfg.p, cfg.q}).aggregate;
  return rep;
}

/// ||D(N(u))||_Y / ||u||_Y^2 for a trajectory on the mesh.
inline double nonlinear_y_constant(const Trajectory& u, const SolverConfig& cfg, const NonlinearWorkspace& ws, const NormContext& ctx) {
  const auto d = duhamel_all(nonlinear_forcing(u, ws, cfg), cfg);
  Trajectory dt;
  for (std::size_t i = 0; i < u.size(); ++i) dt.push(u.times[i], d[i]);
  const double yu = y_norm(u, cfg.p, cfg.d, ctx).total();
  if (!(yu > 0.0)) return 0.0;
  return y_norm(dt, cfg.p, cfg.d, ctx).total() / (yu * yu);
}

/// Per-snapshot diagnostics: t, l2_norm, lp_norm_weighted, besov_crit_norm, energy,
/// curl_l2, residual_flag (1 when the local defect exceeds 10 picard_tol).
inline std::string trajectory_csv(const Trajectory& u, const SpectralField& u0, const SolverConfig& cfg, const NonlinearWorkspace& ws,
                                  const NormContext& ctx) {
  const auto d = duhamel_all(nonlinear_forcing(u, ws, cfg), cfg);
  const double scale = y_scale(u, cfg, ctx);
  const double alpha = 0.5 * (1.0 - cfg.d / cfg.p);
  const BesovIndex crit{critical_s(cfg.p, cfg.d), cfg.p, Exponent::infinity()};
  std::ostringstream out;
  out << "t,l2_norm,lp_norm_weighted,besov_crit_norm,energy,curl_l2,residual_flag\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& f = u.fields[i];
    const double t = u.times[i];
    const double l2 = coefficient_l2(f);
    double enstrophy = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) enstrophy += f.basis->mode(m).lambda * f.coeffs[m] * f.coeffs[m];
    const double defect = coefficient_l2(f - heat_apply(u0, t) + d[i]) / scale;
    out << fmt17(t) << ',' << fmt17(l2) << ',' << fmt17(std::pow(t, alpha) * ctx.lp(f, cfg.p)) << ','
        << fmt17(ctx.besov(f, crit).aggregate) << ',' << fmt17(0.5 * l2 * l2) << ',' << fmt17(std::sqrt(enstrophy)) << ','
        << (defect > 10.0 * cfg.picard_tol ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace sbesov
