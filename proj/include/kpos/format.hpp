#pragma once

#include <charconv>
#include <string>

namespace kpos {

/// Locale-independent decimal text with the given number of significant digits.
inline std::string format_number(double v, int precision = 15) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

/// Shortest text that parses back to exactly v.
inline std::string format_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace kpos
