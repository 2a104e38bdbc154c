#pragma once

#include <cstdio>
#include <string>

namespace riskcal {

/// 17 significant digits, enough to round-trip any finite double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Fixed-point rendering with `decimals` digits.
inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace riskcal
