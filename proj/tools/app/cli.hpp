#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascadenet::app {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitIo = 3 };

/// Parses `args` (without the program name) and runs the selected subcommand.
/// Normal output goes to `out`, warnings and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cascadenet::app
