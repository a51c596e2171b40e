#pragma once

#include <string>
#include <vector>

namespace chaoslab::cli {

/// Parses argv (argv[0] is the program name), runs one subcommand and returns
/// the exit code: 0 success, 1 check failure or numerical error, 2 usage or
/// config error.
int run_command(int argc, const char* const* argv);
int run_command(const std::vector<std::string>& args);

}  // namespace chaoslab::cli
