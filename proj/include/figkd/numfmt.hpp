#pragma once

#include <cstdio>
#include <string>

namespace figkd {

// Canonical float formatting for reports and CSV: 9 significant digits,
// shortest %g spelling, -0 normalized to 0. Parsing a formatted value and
// re-formatting it reproduces the bytes, which is what makes emitted files
// stable under emit -> parse -> emit.
inline std::string format_g9(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace figkd
