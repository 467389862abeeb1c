#pragma once

#include <cstdio>
#include <string>

namespace minechain {

// Fixed float formatting for byte-stable CSV artifacts: 12 significant digits.
inline std::string fmt_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace minechain
