#ifndef DETSCHED_CSV_HPP
#define DETSCHED_CSV_HPP

#include <cstdio>
#include <string>

namespace detsched {

// Shortest-faithful decimal with the given number of significant digits.
inline std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

}  // namespace detsched

#endif
