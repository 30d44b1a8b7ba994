#pragma once

#include <cstdio>
#include <string>

namespace bec {

// Fixed 17-significant-digit rendering; every file the toolkit writes goes
// through this so reruns are byte-identical.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace bec
