#pragma once

#include <iosfwd>

namespace excavsim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

/// Entry point of the command-line tool: run, compare, sweep, validate.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace excavsim
