#pragma once

#include <ostream>

#include "config.hpp"

namespace maslov::cli {

/// Per-sample CSV of one lambda with a '#' summary footer.
ExitCode cmd_trace(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Sweep table as CSV plus a JSON summary with the eigenvalue brackets.
ExitCode cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Bisection on a bracket; JSON result.
ExitCode cmd_refine(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Invariant suite with one line per property.
ExitCode cmd_selftest(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace maslov::cli
