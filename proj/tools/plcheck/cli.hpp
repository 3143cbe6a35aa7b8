#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plcheck::cli {

enum ExitCode : int {
  kSuccess = 0,       // compliant, valid, all events justified
  kNonCompliant = 1,  // also: no satisfiable disjunct, unjustified events
  kInputError = 2,
  kInternalError = 3,
};

/// Runs the plcheck command line (args excludes the program name). Reports
/// go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plcheck::cli
