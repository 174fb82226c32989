#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uclab/report.hpp"

namespace uclab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitHypothesis = 2,
  kExitCritical = 3,
};

int exit_code_for(Verdict v) noexcept;

/// Runs one command line (without the program name). The report JSON goes to
/// `out`, diagnostics and progress to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Copy of a report with timing_ms removed, for determinism comparisons.
Json strip_timing(const Json& report);

}  // namespace uclab::cli
