#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cellpool::cli {

/// Exit codes.
enum Exit : int {
  kOk = 0,
  kRuntime = 1,  ///< I/O and other unexpected failures
  kUsage = 2,
  kValidation = 3,
  kNumerical = 4,
  kCheckFailed = 5,
};

inline constexpr const char* kToolVersion = "cellpool 0.1.0";

/// Parses `args` (without the program name) and runs the subcommand,
/// writing results to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cellpool::cli
