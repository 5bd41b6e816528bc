#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbesov/harness.hpp"

#ifndef SBESOV_VERSION
#define SBESOV_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace sbesov;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalRefusal = 3;
constexpr int kCheckFailure = 4;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// Every artifact directory gets the exact config and a manifest.
class Run {
 public:
  Run(std::string command, const std::string& config_path, const std::string& out)
      : command_(std::move(command)), out_(out), start_(std::chrono::steady_clock::now()) {
    config_ = load_config(config_path);
    fs::create_directories(out_);
    write_file(out_ / "config.ini", config_.text);
  }

  const RunConfig& config() const { return config_; }
  const fs::path& out() const { return out_; }

  void finish(int status) const {
    nlohmann::ordered_json m;
    m["format"] = "stokes-besov-manifest/1";
    m["command"] = command_;
    m["version"] = SBESOV_VERSION;
    m["experiment"] = config_.experiment;
    m["exit_status"] = status;
    m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    m["config"] = config_.text;
    write_file(out_ / "manifest.json", dump(m));
  }

 private:
  std::string command_;
  fs::path out_;
  RunConfig config_;
  std::chrono::steady_clock::time_point start_;
};

int cmd_basis_build(const Run& run) {
  const auto& c = run.config();
  const auto b = build_basis(c.basis_n(), c.basis_k());
  save_basis(*b, (run.out() / "basis.json").string());
  nlohmann::ordered_json s;
  s["format"] = "stokes-besov-basis-summary/1";
  s["n_max"] = b->n_max();
  s["k_max"] = b->k_max();
  s["modes"] = b->size();
  s["lambda_min"] = b->lambda_min();
  s["lambda_max"] = b->lambda_max();
  write_file(run.out() / "summary.json", dump(s));
  std::cout << "basis: " << b->size() << " modes, lambda in [" << fmt17(b->lambda_min()) << ", " << fmt17(b->lambda_max()) << "]\n";
  return kOk;
}

int cmd_verify(const Run& run, const std::string& which, unsigned threads) {
  std::vector<const CheckGroup*> groups;
  if (which == "all") {
    for (const auto& g : check_registry()) groups.push_back(&g);
  } else if (const auto* g = find_check(which)) {
    groups.push_back(g);
  } else {
    std::string known;
    for (const auto& g : check_registry()) known += " " + g.id;
    throw ArgumentError("unknown check '" + which + "'; known:" + known);
  }
  const CheckEnv env(run.config());
  const auto outcomes = run_checks(env, groups, threads);

  std::vector<CheckResult> rows;
  nlohmann::ordered_json s;
  s["format"] = "stokes-besov-verify/1";
  s["n_max"] = env.basis()->n_max();
  s["k_max"] = env.basis()->k_max();
  bool all = true;
  for (const auto& o : outcomes) {
    bool ok = o.error.empty();
    for (const auto& r : o.rows) {
      ok = ok && r.pass;
      rows.push_back(r);
      if (!r.pass) std::cerr << "FAIL " << r.id << ": measured " << fmt17(r.measured) << (r.at_most ? " > " : " < ") << fmt17(r.threshold) << "\n";
    }
    if (!o.error.empty()) std::cerr << "FAIL " << o.group << ": " << o.error << "\n";
    nlohmann::ordered_json g;
    g["pass"] = ok;
    g["checks"] = o.rows.size();
    g["seconds"] = o.seconds;
    if (!o.error.empty()) g["error"] = o.error;
    s["groups"][o.group] = g;
    std::cout << (ok ? "pass " : "FAIL ") << o.group << " (" << o.rows.size() << " checks, " << std::fixed << std::setprecision(1)
              << o.seconds << " s)\n";
    all = all && ok;
  }
  s["pass"] = all;
  write_file(run.out() / "checks.csv", checks_csv(rows));
  write_file(run.out() / "summary.json", dump(s));
  return all ? kOk : kCheckFailure;
}

int cmd_solve(const Run& run) {
  const auto& c = run.config();
  const auto basis = build_basis(c.basis_n(), c.basis_k());
  const auto grid = build_grid(c.grid_radial(), c.grid_angular());
  const NormContext ctx(basis, grid);
  const NonlinearWorkspace ws(basis, grid);
  const auto u0 = generate_data(c.data, basis, ctx.transform());
  const auto result = picard_solve(u0, c.solver, ws, ctx);
  write_file(run.out() / "trajectory.csv", trajectory_csv(result.trajectory, u0, c.solver, ws, ctx));

  nlohmann::ordered_json s;
  s["format"] = "stokes-besov-solve/1";
  s["data_besov_crit_norm"] = ctx.besov(u0, {critical_s(c.solver.p, c.solver.d), c.solver.p, c.solver.q}).aggregate;
  s["picard"] = result.report.to_json();
  if (c.delta0) {
    const double amp = coefficient_l2(u0);
    if (!(amp > 0.0)) throw ArgumentError("delta0 needs nonzero data");
    const auto r = estimate_delta0((1.0 / amp) * u0, c.solver, ws, ctx);
    nlohmann::ordered_json d;
    // The smallness condition is read as a bound on the critical Besov norm of the data.
    d["interpretation"] = "norm";
    d["eps"] = r.eps;
    d["data_norm"] = r.data_norm;
    d["ratio_at_eps"] = r.ratio_at_eps;
    d["bisection_steps"] = r.bisection_steps;
    s["delta0"] = d;
  }
  write_file(run.out() / "summary.json", dump(s));
  std::cout << "picard: " << result.report.iterations << " iterations, converged " << (result.report.converged ? "true" : "false")
            << ", residual " << fmt17(result.report.final_residual) << "\n";
  return result.report.converged ? kOk : kNumericalRefusal;
}

int cmd_embed(const Run& run) {
  const auto& c = run.config();
  const NormContext ctx(build_basis(c.basis_n(), c.basis_k()), build_grid(c.grid_radial(), c.grid_angular()));
  const auto rep = embedding_experiment(c.embed_p, c.embed_widths, ctx, c.data.x0, c.data.y0);
  auto s = rep.summary();
  constexpr double kBesovSpreadMax = 4.0;
  constexpr double kLpSpreadMin = 8.0;
  const bool pass = rep.besov_spread <= kBesovSpreadMax && rep.lp_spread >= kLpSpreadMin;
  s["besov_spread_max"] = kBesovSpreadMax;
  s["lp_spread_min"] = kLpSpreadMin;
  s["pass"] = pass;
  write_file(run.out() / "embedding.csv", rep.to_csv());
  write_file(run.out() / "summary.json", dump(s));
  std::cout << "besov spread " << fmt17(rep.besov_spread) << ", L^p spread " << fmt17(rep.lp_spread) << ", weak-L2 spread "
            << fmt17(rep.weak_spread) << "\n";
  return pass ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for Navier-Stokes in critical Besov spaces on the unit disk"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "artifact directory")->required();
  };

  auto* basis = app.add_subcommand("basis", "basis tools");
  basis->require_subcommand(1);
  auto* build = basis->add_subcommand("build", "compute and cache the eigenbasis");
  common(build);

  auto* verify = app.add_subcommand("verify", "run invariant checks");
  std::string which;
  unsigned threads = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  verify->add_option("check", which, "'all' or a check group id")->required();
  verify->add_option("--threads", threads, "groups run concurrently");
  common(verify);

  auto* solve = app.add_subcommand("solve", "Picard solve of the mild equation");
  common(solve);
  auto* embed = app.add_subcommand("embed", "bump-family embedding experiment");
  common(embed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  std::unique_ptr<Run> run;
  int status = kOk;
  try {
    if (build->parsed()) {
      run = std::make_unique<Run>("basis build", config_path, out_dir);
      status = cmd_basis_build(*run);
    } else if (verify->parsed()) {
      run = std::make_unique<Run>("verify " + which, config_path, out_dir);
      status = cmd_verify(*run, which, threads);
    } else if (solve->parsed()) {
      run = std::make_unique<Run>("solve", config_path, out_dir);
      status = cmd_solve(*run);
    } else if (embed->parsed()) {
      run = std::make_unique<Run>("embed", config_path, out_dir);
      status = cmd_embed(*run);
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = kConfigError;
  } catch (const ResolutionError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    status = kNumericalRefusal;
  } catch (const NumericalError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    status = kNumericalRefusal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = kNumericalRefusal;
  }
  if (run) {
    try {
      run->finish(status);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
    }
  }
  return status;
}
