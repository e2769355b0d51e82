#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "kpos/lti.hpp"

namespace kpos {

/// Malformed system definition; line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses `key = value` statements, one system per text:
///
///     # three-term example
///     poles    = [0.9, 0.5, 0.1]
///     residues = [0.9, 0.5, -0.1]
///
/// Accepted key sets: poles + residues (+ optional fir), num + den, or A + b + c.
/// Lists may span lines; `#` starts a comment.
System parse_system(std::string_view text);
System read_system_file(const std::string& path);

/// Inverse of parse_system with round-trip exact numbers.
std::string write_system(const System& sys);

}  // namespace kpos
