#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbn {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,      // invalid flags or flag values
  kExitInput = 3,      // unreadable or malformed input files
  kExitAlgorithm = 4,  // preconditions of the algorithms not met
};

/// Runs the `cbn` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbn
