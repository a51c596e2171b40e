#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace chaoslab::cli {

/// Everything a subcommand needs: the validated shared config, its own
/// options node, and where to write.
struct Context {
  std::string name;
  RunConfig cfg;
  std::size_t threads = 1;
  std::filesystem::path out;
  std::vector<std::string> outputs;

  /// Errors with exit 2 unless a seed was given by flag or config.
  std::uint64_t seed() const;
};

/// Runs one subcommand; returns 0 on success and 1 when a check found a violation.
using Command = std::function<int(Context&)>;

const std::map<std::string, Command>& commands();
/// One-line description per subcommand for the usage text.
const std::map<std::string, std::string>& command_help();

}  // namespace chaoslab::cli
