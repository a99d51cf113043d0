#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughwalk {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitNumerical = 2 };

/// Runs `roughwalk <args...>`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace roughwalk
