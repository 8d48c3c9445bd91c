#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace opennet {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_parse = 1, exit_precondition = 2, exit_check_failed = 3 };

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opennet
