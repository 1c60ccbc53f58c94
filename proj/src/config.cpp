#include "nsqp/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nsqp/errors.hpp"

namespace nsqp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError("'" + key + "': expected a number, got '" + value + "'");
  }
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError("'" + key + "': expected an integer, got '" + value + "'");
  }
  return v;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "problem", "x0",          "eta",     "tau_alpha",    "gamma",
      "theta0",  "eps",         "eps_c",   "max_iter",     "alpha_min",
      "b",       "b_rule",      "b_early", "b_late",       "switch_iter",
      "qp_tolerance", "qp_max_iterations", "sigma", "ell", "c_b",
      "output"};
  return keys;
}

Vector parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(to_double("x0", trim(cell)));
  if (vals.empty()) throw ConfigError("'x0': empty vector");
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    out.emplace_back(normalize_key(trim(line.substr(0, eq))), trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  SolverConfig& s = cfg.solver;
  if (key == "problem") {
    cfg.problem = value;
  } else if (key == "x0") {
    cfg.x0 = parse_vector(value);
  } else if (key == "eta") {
    s.eta = to_double(key, value);
  } else if (key == "tau_alpha") {
    s.tau_alpha = to_double(key, value);
  } else if (key == "gamma") {
    s.gamma = to_double(key, value);
  } else if (key == "theta0") {
    s.theta0 = to_double(key, value);
  } else if (key == "eps") {
    s.eps = to_double(key, value);
  } else if (key == "eps_c") {
    s.eps_c = to_double(key, value);
  } else if (key == "max_iter") {
    s.max_iter = to_int(key, value);
  } else if (key == "alpha_min") {
    s.alpha_min = to_double(key, value);
  } else if (key == "b") {
    cfg.b = to_double(key, value);
  } else if (key == "b_rule") {
    if (value != "fixed" && value != "two-phase") {
      throw ConfigError("'b_rule': expected fixed or two-phase, got '" + value + "'");
    }
    cfg.b_rule = value;
  } else if (key == "b_early") {
    cfg.b_early = to_double(key, value);
  } else if (key == "b_late") {
    cfg.b_late = to_double(key, value);
  } else if (key == "switch_iter") {
    cfg.switch_iter = to_int(key, value);
  } else if (key == "qp_tolerance") {
    s.qp.tolerance = to_double(key, value);
  } else if (key == "qp_max_iterations") {
    s.qp.max_iterations = to_int(key, value);
  } else if (key == "sigma") {
    cfg.sigma = to_double(key, value);
  } else if (key == "ell") {
    cfg.ell = to_double(key, value);
  } else if (key == "c_b") {
    cfg.c_b = to_double(key, value);
  } else if (key == "output") {
    cfg.output = value;
  } else {
    throw ConfigError("unknown config key '" + raw_key + "'");
  }
}

void apply_settings(RunConfig& cfg, const KeyValues& kv) {
  for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
}

void finalize(RunConfig& cfg, const NamedProblem& problem) {
  if (cfg.b_rule == "fixed") {
    cfg.solver.b_rule = FixedB{cfg.b.value_or(problem.default_b)};
  } else {
    cfg.solver.b_rule =
        TwoPhaseB{cfg.b_early.value_or(cfg.b.value_or(problem.default_b)), cfg.b_late,
                  cfg.switch_iter};
  }
  if (cfg.x0 && cfg.x0->size() != problem.spec.n) {
    throw ConfigError("x0 has " + std::to_string(cfg.x0->size()) + " entries, problem needs " +
                      std::to_string(problem.spec.n));
  }
  cfg.solver.validate();
  const double b_low = rule_lower_bound(cfg.solver.b_rule);
  if (problem.spec.rho && !(b_low > *problem.spec.rho)) {
    throw ConfigError("b must exceed rho = " + std::to_string(*problem.spec.rho) + " (got " +
                      std::to_string(b_low) + ")");
  }
}

}  // namespace nsqp
