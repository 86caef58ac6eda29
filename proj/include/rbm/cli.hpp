#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rbm {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitArgument = 2, kExitNumerical = 3, kExitIo = 4 };

/// Runs one subcommand. `args` excludes the program name. Reports go to `out`,
/// diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rbm
