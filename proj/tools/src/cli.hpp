#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace maslov::cli {

/// Runs the command line args (args[0] is the program name) and returns
/// the exit code: 0 success, 1 selftest failure, 2 config error,
/// 3 backend disagreement, 4 model or numerical error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maslov::cli
