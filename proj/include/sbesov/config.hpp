#pragma once

// Run configuration: an INI-style file of `key = value` lines grouped in [sections].
// Everything is validated before any computation; errors carry the line number.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sbesov/besov.hpp"
#include "sbesov/errors.hpp"
#include "sbesov/mild_solver.hpp"
#include "sbesov/nonlinear.hpp"

namespace sbesov {

class ConfigError : public ArgumentError {
 public:
  ConfigError(int line, const std::string& msg)
      : ArgumentError(line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

/// Parsed sections, keyed "section.key".
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text) {
    ConfigDocument doc;
    doc.text_ = text;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      auto s = strip(raw.substr(0, raw.find_first_of("#;")));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError(line, "unterminated section header");
        section = strip(s.substr(1, s.size() - 2));
        if (!known_section(section)) throw ConfigError(line, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
      if (section.empty()) throw ConfigError(line, "key outside any section");
      const auto key = strip(s.substr(0, eq));
      const auto value = strip(s.substr(eq + 1));
      if (key.empty()) throw ConfigError(line, "empty key");
      if (value.empty()) throw ConfigError(line, "empty value for '" + key + "'");
      const auto full = section + "." + key;
      if (doc.entries_.count(full)) throw ConfigError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(doc.entries_[full].line) + ")");
      doc.entries_[full] = {value, line, false};
    }
    return doc;
  }

  const std::string& text() const { return text_; }

  const ConfigEntry* find(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto* e = find(key);
    return e ? e->value : fallback;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    return to_double(e->value, e->line, key);
  }

  int get_int(const std::string& key, int fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    const double v = to_double(e->value, e->line, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(e->line, "'" + key + "' must be an integer (got " + e->value + ")");
    return static_cast<int>(v);
  }

  Exponent get_exponent(const std::string& key, Exponent fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    try {
      return parse_exponent(e->value);
    } catch (const ArgumentError& err) {
      throw ConfigError(e->line, "'" + key + "': " + err.what());
    }
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    std::istringstream in(e->value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_double(strip(item), e->line, key));
    return out;
  }

  /// Keys that were set but never read: typos, or options of another data kind.
  void reject_unused() const {
    for (const auto& [k, e] : entries_) {
      if (!e.used) throw ConfigError(e.line, "unknown or unused key '" + k + "'");
    }
  }

 private:
  static std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static bool known_section(const std::string& s) {
    return s == "run" || s == "basis" || s == "grid" || s == "solver" || s == "data" || s == "embed" || s == "verify";
  }

  static double to_double(const std::string& v, int line, const std::string& key) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || !std::isfinite(d)) throw ConfigError(line, "'" + key + "' must be a finite number (got " + v + ")");
    return d;
  }

  std::string text_;
  mutable std::map<std::string, ConfigEntry> entries_;
};

enum class DataKind { single_mode, mode_sum, band_random, spectral_slope, bump_family };

struct ModeRef {
  int n = 0;
  Parity parity = Parity::cosine;
  int k = 1;
};

struct DataGeneratorSpec {
  DataKind kind = DataKind::single_mode;
  double amplitude = 1.0;
  std::vector<ModeRef> modes{ModeRef{}};  // single_mode uses the first
  int j = 4;
  std::uint64_t seed = 0;
  double slope = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 0.2;
};

struct RunConfig {
  std::string experiment = "default";
  bool delta0 = false;  // solve: also bisect for the smallness threshold along the data direction
  int n_max = 32;
  int k_max = 32;
  std::string basis_cache;
  int radial_order = 0;   // 0: 4 k_max
  int angular_count = 0;  // 0: 8 n_max
  SolverConfig solver;
  DataGeneratorSpec data;
  double embed_p = 4.0;
  std::vector<double> embed_widths{0.4, 0.2, 0.1};
  int verify_scale = 1;  // 2 doubles the truncation
  std::string text;      // the file as read, echoed into manifests

  int grid_radial() const { return radial_order > 0 ? radial_order : 4 * k_max * verify_scale; }
  int grid_angular() const { return angular_count > 0 ? angular_count : 8 * n_max * verify_scale; }
  int basis_n() const { return n_max * verify_scale; }
  int basis_k() const { return k_max * verify_scale; }
};

inline ModeRef parse_mode(const std::string& s, int line) {
  std::istringstream in(s);
  ModeRef m;
  std::string parity;
  if (!(in >> m.n >> parity >> m.k) || (parity != "cos" && parity != "sin")) {
    throw ConfigError(line, "mode must read 'n cos|sin k' (got '" + s + "')");
  }
  std::string rest;
  if (in >> rest) throw ConfigError(line, "trailing text in mode '" + s + "'");
  m.parity = parity == "cos" ? Parity::cosine : Parity::sine;
  return m;
}

inline RunConfig parse_config(const std::string& text) {
  const auto doc = ConfigDocument::parse(text);
  RunConfig c;
  c.text = text;
  c.experiment = doc.get_string("run.experiment", c.experiment);
  const std::string d0 = doc.get_string("run.delta0", "false");
  if (d0 != "true" && d0 != "false") throw ConfigError(doc.line_of("run.delta0"), "delta0 must be true or false");
  c.delta0 = d0 == "true";

  c.n_max = doc.get_int("basis.n_max", c.n_max);
  c.k_max = doc.get_int("basis.k_max", c.k_max);
  c.basis_cache = doc.get_string("basis.cache", "");
  if (c.n_max < 1 || c.n_max > 128) throw ConfigError(doc.line_of("basis.n_max"), "n_max must lie in [1, 128]");
  if (c.k_max < 1 || c.k_max > 128) throw ConfigError(doc.line_of("basis.k_max"), "k_max must lie in [1, 128]");

  c.radial_order = doc.get_int("grid.radial_order", 0);
  c.angular_count = doc.get_int("grid.angular_count", 0);
  if (c.radial_order < 0 || c.radial_order > 2048) throw ConfigError(doc.line_of("grid.radial_order"), "radial_order must lie in [1, 2048]");
  if (c.angular_count < 0 || c.angular_count % 2 != 0 || (c.angular_count > 0 && c.angular_count < 4)) {
    throw ConfigError(doc.line_of("grid.angular_count"), "angular_count must be even and >= 4");
  }

  auto& s = c.solver;
  s.p = doc.get_double("solver.p", s.p);
  s.q = doc.get_exponent("solver.q", s.q);
  s.d = doc.get_int("solver.d", s.d);
  s.T = doc.get_double("solver.T", s.T);
  s.mesh_count = doc.get_int("solver.mesh_count", s.mesh_count);
  s.grading = doc.get_double("solver.grading", s.grading);
  s.picard_tol = doc.get_double("solver.picard_tol", s.picard_tol);
  s.max_picard = doc.get_int("solver.max_picard", s.max_picard);
  const std::string nl = doc.get_string("solver.nonlinear", "true");
  if (nl != "true" && nl != "false") throw ConfigError(doc.line_of("solver.nonlinear"), "nonlinear must be true or false");
  s.nonlinear = nl == "true";
  if (!(s.p > s.d)) throw ConfigError(doc.line_of("solver.p"), "need d < p < ∞ (got p = " + fmt17(s.p) + ", d = " + std::to_string(s.d) + ")");
  try {
    s.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(0, std::string("[solver] ") + e.what());
  }

  auto& d = c.data;
  const std::string kind = doc.get_string("data.kind", "single_mode");
  const int kind_line = doc.line_of("data.kind");
  d.amplitude = doc.get_double("data.amplitude", d.amplitude);
  if (kind == "single_mode") {
    d.kind = DataKind::single_mode;
    if (const auto* e = doc.find("data.mode")) d.modes = {parse_mode(e->value, e->line)};
  } else if (kind == "mode_sum") {
    d.kind = DataKind::mode_sum;
    const auto* e = doc.find("data.modes");
    if (!e) throw ConfigError(kind_line, "mode_sum needs 'modes = n cos|sin k, ...'");
    d.modes.clear();
    std::istringstream in(e->value);
    std::string item;
    while (std::getline(in, item, ',')) d.modes.push_back(parse_mode(item, e->line));
  } else if (kind == "band_random") {
    d.kind = DataKind::band_random;
    d.j = doc.get_int("data.j", d.j);
    d.seed = static_cast<std::uint64_t>(doc.get_int("data.seed", 0));
  } else if (kind == "spectral_slope") {
    d.kind = DataKind::spectral_slope;
    d.slope = doc.get_double("data.slope", d.slope);
    d.seed = static_cast<std::uint64_t>(doc.get_int("data.seed", 0));
  } else if (kind == "bump_family") {
    d.kind = DataKind::bump_family;
    d.x0 = doc.get_double("data.x0", d.x0);
    d.y0 = doc.get_double("data.y0", d.y0);
    d.h = doc.get_double("data.h", d.h);
    if (!(d.h > 0.0)) throw ConfigError(doc.line_of("data.h"), "bump width h must be positive");
    if (std::hypot(d.x0, d.y0) >= 1.0) throw ConfigError(doc.line_of("data.x0"), "bump centre must lie inside the disk");
  } else {
    throw ConfigError(kind_line, "unknown data kind '" + kind + "' (single_mode, mode_sum, band_random, spectral_slope, bump_family)");
  }

  c.embed_p = doc.get_double("embed.p", c.embed_p);
  if (!(c.embed_p > 2.0)) throw ConfigError(doc.line_of("embed.p"), "need d < p < ∞ (got p = " + fmt17(c.embed_p) + ", d = 2)");
  c.embed_widths = doc.get_list("embed.widths", c.embed_widths);
  for (double w : c.embed_widths) {
    if (!(w > 0.0)) throw ConfigError(doc.line_of("embed.widths"), "bump widths must be positive");
  }

  c.verify_scale = doc.get_int("verify.scale", 1);
  if (c.verify_scale != 1 && c.verify_scale != 2) throw ConfigError(doc.line_of("verify.scale"), "verify.scale must be 1 or 2");
  if (c.basis_n() > 128 || c.basis_k() > 128) throw ConfigError(doc.line_of("verify.scale"), "scaled truncation exceeds 128");

  doc.reject_unused();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(0, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sbesov
