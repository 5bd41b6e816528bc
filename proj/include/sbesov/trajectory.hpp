#pragma once

#include <string>
#include <vector>

#include "sbesov/errors.hpp"
#include "sbesov/spectral_basis.hpp"

namespace sbesov {

/// Time samples of a field. times[0] may be 0 (the data); weighted norms skip it.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> fields;
  std::string provenance;

  std::size_t size() const { return times.size(); }

  void push(double t, SpectralField f) {
    if (!times.empty() && !(t > times.back())) throw ArgumentError("trajectory times must increase");
    if (!fields.empty() && f.size() != fields.front().size()) throw ArgumentError("trajectory fields must share a basis");
    times.push_back(t);
    fields.push_back(std::move(f));
  }
};

}  // namespace sbesov
