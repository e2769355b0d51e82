#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kpos/positivity.hpp"

namespace kpos {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitCertified = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitHolds = 3,
  kExitRefuted = 4,
  kExitUnsupported = 5,
};

int exit_code(Verdict v);

/// Runs the tool with argv-style arguments (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpos
