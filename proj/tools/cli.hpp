#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brox::cli {

/// Exit codes of the brox tool.
enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs the tool on `args` (args[0] is the program name). Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brox::cli
