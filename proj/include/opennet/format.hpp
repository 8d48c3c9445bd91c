#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace opennet {

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace opennet
