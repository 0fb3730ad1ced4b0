#pragma once

#include <iosfwd>

#include "symcurv/config.hpp"

namespace symcurv {

inline constexpr int kExitVerified = 0;
inline constexpr int kExitRefuted = 1;
inline constexpr int kExitError = 2;

/// Runs the configured command. Human summary goes to `out`, diagnostics of
/// usage/runtime errors to `err`; CSV artifacts (report.csv always, witness.txt
/// on exit 1) are written to config.output_dir.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace symcurv
