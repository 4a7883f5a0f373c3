#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blochgrass {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitNumerical = 4 };

/// Runs the tool on `args` (program name excluded). Results go to `out`
/// unless an output path is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace blochgrass
