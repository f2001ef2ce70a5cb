#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qrecycle::cli {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,       // bad flags or I/O failure
  kInfeasible = 2,  // no tier-1 filter reaches the fidelity threshold
};

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qrecycle::cli
