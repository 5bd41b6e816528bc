#pragma once

#include <cstdio>
#include <string>

namespace sbesov {

/// Fixed 17-significant-digit rendering; round-trips binary64 and is byte-stable.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace sbesov
