#pragma once

#include <string>
#include <vector>

namespace gdl {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,   ///< bad flags, config file or ensemble
  kExitNumeric = 3,  ///< a numerical routine failed
};

/// Entry point of the `gdl` tool. argv[0] is the program name.
int run_cli(int argc, const char* const* argv);

/// Same, with the arguments after the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace gdl
