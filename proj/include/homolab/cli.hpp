#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace homolab::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kViolation = 2, kNumericalFailure = 3 };

/// Run the command line. `args` excludes the program name. Results go to
/// `out` (or to --out files); errors go to `err` as one-line JSON objects.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homolab::cli
