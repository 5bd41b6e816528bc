#pragma once

// Versioned JSON cache for a Basis. Reals are written with 17 significant digits,
// which round-trips binary64 exactly.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sbesov/format.hpp"
#include "sbesov/spectral_basis.hpp"

namespace sbesov {

inline constexpr const char* kBasisFormat = "stokes-besov-basis/1";

/// Serializes a basis. Reals go through "%.17g" literals so the text is byte-stable.
inline std::string basis_to_json(const Basis& basis) {
  std::ostringstream out;
  out << "{\n  \"format\": \"" << kBasisFormat << "\",\n";
  out << "  \"n_max\": " << basis.n_max() << ",\n  \"k_max\": " << basis.k_max() << ",\n  \"modes\": [";
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& m = basis.mode(i);
    out << (i ? ",\n" : "\n") << "    {\"n\": " << m.n << ", \"parity\": \"" << to_string(m.parity) << "\", \"k\": " << m.k
        << ", \"zero\": " << fmt17(m.zero) << ", \"lambda\": " << fmt17(m.lambda)
        << ", \"stream_norm\": " << fmt17(m.stream_norm) << "}";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

/// Parses a basis document. The stored values are taken as-is (no recomputation),
/// so a tampered cache is loaded faithfully and caught by the verification checks.
inline BasisPtr basis_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("basis cache: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kBasisFormat) {
    throw ArgumentError(std::string("basis cache: expected format ") + kBasisFormat);
  }
  try {
    std::vector<EigenMode> modes;
    for (const auto& rec : doc.at("modes")) {
      EigenMode m;
      m.n = rec.at("n").get<int>();
      const auto parity = rec.at("parity").get<std::string>();
      if (parity != "cos" && parity != "sin") throw ArgumentError("basis cache: parity must be cos or sin");
      m.parity = parity == "cos" ? Parity::cosine : Parity::sine;
      m.k = rec.at("k").get<int>();
      m.lambda = rec.at("lambda").get<double>();
      m.stream_norm = rec.at("stream_norm").get<double>();
      m.zero = rec.contains("zero") ? rec.at("zero").get<double>() : std::sqrt(m.lambda);
      m.velocity_norm = m.zero * m.stream_norm;
      modes.push_back(m);
    }
    return std::make_shared<const Basis>(doc.at("n_max").get<int>(), doc.at("k_max").get<int>(), std::move(modes));
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("basis cache: ") + e.what());
  }
}

inline void save_basis(const Basis& basis, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot write " + path);
  f << basis_to_json(basis);
}

inline BasisPtr load_basis(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ArgumentError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return basis_from_json(ss.str());
}

}  // namespace sbesov
