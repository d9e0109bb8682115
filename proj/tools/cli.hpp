#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace illusionpad {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitDomain = 3, kExitSearch = 4 };

/// Runs the `illusionpad` command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace illusionpad
