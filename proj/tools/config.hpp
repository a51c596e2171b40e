#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "chaoslab/analyticity.hpp"
#include "chaoslab/chaos.hpp"

namespace chaoslab::cli {

using json = nlohmann::json;
using cplx = std::complex<double>;

/// Malformed configuration; the message starts with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Read-only view of one JSON object that remembers which keys were read, so
/// leftovers can be reported as unknown.
class Node {
 public:
  Node(const json& j, std::string path);

  const std::string& path() const noexcept { return path_; }
  bool has(const std::string& key) const;
  /// Sub-object at `key`; ConfigError if present but not an object.
  Node child(const std::string& key);
  /// Raw value at `key` (marked as read); null if absent.
  const json& raw(const std::string& key);

  std::optional<double> number(const std::string& key);
  std::optional<std::int64_t> integer(const std::string& key);
  std::optional<std::uint64_t> unsigned_integer(const std::string& key);
  std::optional<std::string> string(const std::string& key);
  std::optional<bool> boolean(const std::string& key);
  std::optional<std::vector<double>> numbers(const std::string& key);
  std::optional<std::vector<std::size_t>> sizes(const std::string& key);
  std::optional<cplx> complex(const std::string& key);
  /// A single complex value or a list of them.
  std::optional<std::vector<cplx>> complexes(const std::string& key);

  std::string key_path(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  /// Throws ConfigError naming the first key that was never read.
  void finish() const;

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> used_;
};

/// Parses "1", "-0.5", "0.4i", "1+0.4i", "1-2e-1i" and JSON forms number, [re, im].
cplx parse_complex(const std::string& s);
cplx complex_from_json(const json& j, const std::string& path);

/// Model from the field_models schema. Built schedules get `schedule.n_max`
/// levels (default 4096).
std::shared_ptr<const FieldModel> parse_model(Node node);
CoefficientLaw parse_law(const json& j, const std::string& path);
/// "one" | {"poly": [...]} | {"trig": {"freq", "phase"}} | {"dyadic": {"l", "i"}},
/// optionally {"coeff": c, ...}, or a list of those summed.
TestFunction parse_test_function(const json& j, const std::string& path);

struct BetaRegion {
  std::vector<BetaCircle> circles;
  std::optional<BetaRectangle> rectangle;
};

/// Shared keys of every subcommand. Absent keys stay empty; each subcommand
/// supplies its own defaults.
struct RunConfig {
  json source;
  std::optional<json> model_json;
  std::optional<std::vector<cplx>> betas;
  std::optional<std::vector<std::size_t>> levels;
  std::optional<unsigned> g;
  std::optional<double> oversample;
  std::optional<double> alpha;  // empty for "auto" or absent
  bool alpha_auto = false;
  std::optional<double> p;
  std::optional<std::size_t> replicas;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<BetaRegion> region;
  std::optional<std::string> output_dir;
  json options = json::object();

  std::shared_ptr<const FieldModel> model() const;
  QuadratureSpec quad(unsigned default_g) const;
};

/// Validates the top-level schema; unknown keys raise ConfigError.
RunConfig parse_run_config(const json& j);

}  // namespace chaoslab::cli
