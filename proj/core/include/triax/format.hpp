#pragma once

#include <charconv>
#include <string>

namespace triax {

/// Shortest decimal form that round-trips to the same double. All CSV/JSON
/// artifacts and literals go through this so fixture files are stable.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace triax
