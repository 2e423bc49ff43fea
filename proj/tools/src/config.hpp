#pragma once

// Run configuration shared by the subcommands. Values are merged from, in
// increasing precedence: built-in defaults, a JSON config file, MASLOV_*
// environment variables and command-line flags. Keys are the flag names.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "maslov/crossings.hpp"

namespace maslov::cli {

enum class ExitCode : int { ok = 0, failure = 1, config = 2, disagreement = 3, model = 4 };

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string model = "kdv7";
  double x_minus = -20.0;
  double x_plus = 20.0;
  double step = 0.0;  // resolved: (x_plus - x_minus) / 4000 when not given
  double lambda = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  std::optional<double> lambda_step;
  std::optional<long> lambda_count;
  Backend backend = Backend::both;
  UnitaryScheme scheme = UnitaryScheme::euler;
  Tolerances tol = kDefaultTolerances;
  std::string out;       // empty: standard output
  std::string summary;   // sweep JSON summary; empty: derived from out
  unsigned workers = 1;
  std::optional<std::pair<double, double>> bracket;
  double tol_lambda = 1e-4;
  bool corrupt_tolerance = false;  // selftest hook: every property must fail
};

/// Flag names accepted as keys, in documentation order.
const std::vector<std::string>& config_keys();

/// Reads a JSON object from path; parse errors report line and column.
nlohmann::json load_config_file(const std::string& path);

/// Values of MASLOV_<KEY> variables (dashes become underscores) present in
/// the environment, converted to JSON by the type of each key.
nlohmann::json environment_overrides();

/// Converts a raw string for key into JSON (numbers, pairs "a,b" or "a b").
nlohmann::json parse_value(const std::string& key, const std::string& raw);

/// Validates merged settings and fills model-dependent defaults.
RunConfig resolve_config(const nlohmann::json& merged);

/// The spatial grid of the configuration.
std::vector<double> x_grid(const RunConfig& config);

/// The spectral grid for sweep; throws ConfigError when it is empty.
std::vector<double> lambda_grid(const RunConfig& config);

std::string backend_name(Backend backend);
std::string scheme_name(UnitaryScheme scheme);

}  // namespace maslov::cli
