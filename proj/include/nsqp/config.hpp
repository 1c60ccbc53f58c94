#pragma once

// Run configuration: flat key=value text with '#' comments. Keys mirror
// SolverConfig plus the problem name, an x0 override, potential parameters
// and the output path. Hyphens and underscores in keys are interchangeable.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsqp/driver.hpp"
#include "nsqp/library.hpp"

namespace nsqp {

struct RunConfig {
  std::string problem;
  std::optional<Vector> x0;
  SolverConfig solver;
  std::string b_rule = "fixed";  // fixed | two-phase
  std::optional<double> b;
  std::optional<double> b_early;
  double b_late = 1e6;
  int switch_iter = 100;
  std::optional<double> sigma;
  std::optional<double> ell;
  std::optional<double> c_b;
  std::string output;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

const std::vector<std::string>& config_keys();

/// Throws FormatError on lines without '='.
KeyValues parse_key_values(std::istream& in);
KeyValues read_config_file(const std::string& path);

/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_settings(RunConfig& cfg, const KeyValues& kv);

/// Resolves the B rule against the problem's default b, checks x0 and
/// b > rho, and runs SolverConfig::validate. Throws ConfigError.
void finalize(RunConfig& cfg, const NamedProblem& problem);

Vector parse_vector(const std::string& text);

}  // namespace nsqp
