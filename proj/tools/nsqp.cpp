// nsqp command-line tool: solve, validate, rate, monitor.
//
// Exit codes: 0 ok, 1 bad configuration or unknown problem, 2 iteration cap,
// 3 solver error, 4 validation or monitor failure, 5 trace too short,
// 6 monitor premises violated.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsqp/analysis.hpp"
#include "nsqp/config.hpp"
#include "nsqp/driver.hpp"
#include "nsqp/errors.hpp"
#include "nsqp/library.hpp"
#include "nsqp/problem.hpp"
#include "nsqp/trace_io.hpp"

namespace {

using namespace nsqp;

enum Exit : int {
  kOk = 0,
  kBadConfig = 1,
  kMaxIter = 2,
  kSolverError = 3,
  kCheckFailed = 4,
  kShortTrace = 5,
  kPremise = 6,
};

// Raw flag values, applied on top of the config file with the same parser.
struct RunFlags {
  std::string problem;
  std::string config_path;
  std::map<std::string, std::optional<std::string>> values;
};

void add_run_flags(CLI::App* sub, RunFlags& flags) {
  sub->add_option("problem", flags.problem, "catalog problem name");
  sub->add_option("--config", flags.config_path, "key=value configuration file");
  for (const auto& key : config_keys()) {
    if (key == "problem") continue;
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    sub->add_option("--" + flag, flags.values[key], "overrides '" + key + "'");
  }
}

RunConfig load_config(const RunFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) apply_settings(cfg, read_config_file(flags.config_path));
  if (!flags.problem.empty()) cfg.problem = flags.problem;
  for (const auto& [key, value] : flags.values) {
    if (value) apply_setting(cfg, key, *value);
  }
  if (cfg.problem.empty()) throw ConfigError("no problem given");
  return cfg;
}

int status_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return kOk;
    case SolveStatus::MaxIterations: return kMaxIter;
    default: return kSolverError;
  }
}

std::string vec_str(const Vector& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += format_double(x(i));
  }
  return out + ")";
}

void print_summary(const SolveResult& r) {
  std::printf("status      %s\n", to_string(r.status).c_str());
  if (!r.message.empty()) std::printf("message     %s\n", r.message.c_str());
  std::printf("iterations  %zu\n", r.trace.size());
  if (r.trace.empty()) return;
  const IterationRecord& f = r.final_record();
  std::printf("f           %.17g\n", f.f);
  std::printf("v           %.3e\n", f.v);
  std::printf("theta       %.17g\n", f.theta);
  std::printf("step_norm   %.3e\n", f.step_norm);
  std::printf("kkt         stationarity %.3e  primal_eq %.3e  primal_ineq %.3e  "
              "complementarity %.3e  dual_sign %.3e\n",
              f.kkt.stationarity, f.kkt.primal_eq, f.kkt.primal_ineq, f.kkt.complementarity,
              f.kkt.dual_sign);
  std::printf("x           %s\n", vec_str(f.x).c_str());
}

// --------------------------------------------------------------------------

int cmd_solve(const RunFlags& flags) {
  RunConfig cfg;
  NamedProblem problem;
  try {
    cfg = load_config(flags);
    problem = build(cfg.problem);
    finalize(cfg, problem);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  SolveResult result;
  try {
    result = solve(problem.spec, cfg.x0.value_or(problem.x0), cfg.solver);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  const std::string out = cfg.output.empty() ? problem.name + ".csv" : cfg.output;
  try {
    write_trace_csv(out, result.trace, problem.spec.n);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  print_summary(result);
  std::printf("trace       %s\n", out.c_str());
  return status_exit(result.status);
}

// --------------------------------------------------------------------------

struct ValidateFlags {
  std::string problem;
  std::optional<double> rho;
  std::optional<double> h;
  int samples = 1000;
  std::uint64_t seed = 1;
  double tol = 1e-10;
};

int cmd_validate(const ValidateFlags& flags) {
  NamedProblem problem;
  try {
    problem = build(flags.problem);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  if (flags.samples < 1) {
    std::fprintf(stderr, "error: --samples must be positive\n");
    return kBadConfig;
  }
  bool ok = true;
  try {
    const UpperC2Report u = validate_upper_c2(problem.spec, flags.samples, flags.seed, flags.rho);
    const bool pass = u.max_violation <= flags.tol;
    ok = ok && pass;
    std::printf("upper-c2       %s  rho %.17g  max_violation %.17g  rho_estimate %.17g  samples %d\n",
                pass ? "PASS" : "FAIL", u.rho_used, u.max_violation, u.rho_estimate, u.samples);
    if (!pass) {
      std::printf("  worst x      %s\n  worst xbar   %s\n", vec_str(u.worst_x).c_str(),
                  vec_str(u.worst_xbar).c_str());
    }
    if (problem.spec.m() > 0) {
      const LinearizationReport l =
          validate_linearization(problem.spec, flags.samples, flags.seed, flags.h);
      const bool lpass = l.max_violation <= flags.tol;
      ok = ok && lpass;
      std::printf("linearization  %s  H %.17g  max_violation %.17g  samples %d\n",
                  lpass ? "PASS" : "FAIL", l.h_used, l.max_violation, l.samples);
      if (!lpass) {
        std::printf("  worst x      %s\n  worst x'     %s\n  row          %d\n",
                    vec_str(l.worst_x).c_str(), vec_str(l.worst_xprime).c_str(), l.worst_row);
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  return ok ? kOk : kCheckFailed;
}

// --------------------------------------------------------------------------

struct RateFlags {
  std::string trace;
  std::string output;
  int from = 0;
};

int cmd_rate(const RateFlags& flags) {
  TraceTable table;
  try {
    table = read_trace_csv(flags.trace);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  if (flags.from < 0) {
    std::fprintf(stderr, "error: --from must be >= 0\n");
    return kBadConfig;
  }
  std::vector<Vector> xs = table.iterates();
  std::vector<int> ks;
  for (const auto& row : table.rows) ks.push_back(static_cast<int>(row[0]));
  if (static_cast<std::size_t>(flags.from) < xs.size()) {
    xs.erase(xs.begin(), xs.begin() + flags.from);
    ks.erase(ks.begin(), ks.begin() + flags.from);
  } else {
    xs.clear();
  }
  const std::vector<double> errors = tail_errors(xs);
  if (errors.size() < 3) {
    std::fprintf(stderr, "error: trace too short for a rate fit (%zu usable errors)\n",
                 errors.size());
    return kShortTrace;
  }
  const RateFit fit = fit_linear_rate(errors);
  std::printf("q0 %.17g\nq1 %.17g\nr2 %.17g\npoints %d\n", fit.q0, fit.q1, fit.r_squared,
              fit.points);
  if (fit.q0 >= 1.0) std::fprintf(stderr, "warning: q0 >= 1, no linear decrease in the error\n");

  const std::string out = flags.output.empty() ? flags.trace + ".rate.csv" : flags.output;
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "error: cannot write '%s'\n", out.c_str());
    return kBadConfig;
  }
  f << "k,error,log_error\n";
  const Vector& last = xs.back();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double e = (xs[i] - last).norm();
    if (e > 0.0) f << ks[i] << ',' << format_double(e) << ',' << format_double(std::log(e)) << '\n';
  }
  std::printf("log-error   %s\n", out.c_str());
  return kOk;
}

// --------------------------------------------------------------------------

struct MonitorFlagsCli {
  bool all = false;
  std::map<std::string, bool> selected;
};

const std::vector<std::string>& monitor_names() {
  static const std::vector<std::string> names = {
      "multiplier-bounds", "qp-residuals",   "line-search", "merit",      "theta-tail",
      "slack-tail",        "full-step",      "step-bound",  "step-vanishing", "kkt",
      "potential",         "subgradient",    "mfcq"};
  return names;
}

int cmd_monitor(const RunFlags& run, const MonitorFlagsCli& mflags) {
  std::map<std::string, bool> want;
  bool any = false;
  for (const auto& name : monitor_names()) {
    const auto it = mflags.selected.find(name);
    want[name] = it != mflags.selected.end() && it->second;
    any = any || want[name];
  }
  const bool all = mflags.all || !any;

  RunConfig cfg;
  NamedProblem problem;
  try {
    cfg = load_config(run);
    problem = build(cfg.problem);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  const ProblemSpec& spec = problem.spec;
  const bool low_dim = spec.n <= 2;
  if (all) {
    for (auto& [name, on] : want) on = true;
    if (!problem.has_tag("affine")) want["full-step"] = false;
    if (!low_dim) want["potential"] = false;
  }
  const bool needs_potential = want["potential"] || want["subgradient"];
  double sigma = 0.0;
  if (needs_potential) {
    if (!spec.rho) {
      std::fprintf(stderr, "error: potential monitors need a declared rho\n");
      return kBadConfig;
    }
    sigma = cfg.sigma.value_or(*spec.rho + 1.0);
    // The descent premises need b >= sigma.
    if (!cfg.b && cfg.b_rule == "fixed") cfg.b = std::max(problem.default_b, sigma);
  }
  try {
    finalize(cfg, problem);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  const double b = rule_lower_bound(cfg.solver.b_rule);

  SolveResult result;
  try {
    result = solve(spec, cfg.x0.value_or(problem.x0), cfg.solver);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadConfig;
  }
  print_summary(result);
  if (!cfg.output.empty()) write_trace_csv(cfg.output, result.trace, spec.n);
  if (result.trace.empty()) return status_exit(result.status);

  PotentialParams params;
  if (needs_potential) {
    params = default_potential_params(spec, b, result.final_record().theta);
    params.sigma = sigma;
    if (cfg.ell) params.ell = *cfg.ell;
    else params.ell = std::min(2.0 * b - sigma, b);
    if (cfg.c_b) params.c_b = *cfg.c_b;
    const auto violated = potential_premise_violations(spec, params, b);
    if (!violated.empty()) {
      std::fprintf(stderr, "premise violated:");
      for (const auto& v : violated) std::fprintf(stderr, " %s;", v.c_str());
      std::fprintf(stderr, "\n");
      return kPremise;
    }
    std::printf("potential   b %g  sigma %g  l %g  c_b %g\n", b, params.sigma, params.ell,
                params.c_b);
  }

  const auto& trace = result.trace;
  std::vector<MonitorResult> results;
  std::vector<std::string> skipped;
  auto run_one = [&](const std::string& name, auto&& fn) {
    if (!want[name]) return;
    try {
      results.push_back(fn());
    } catch (const PremiseError& e) {
      throw;
    } catch (const Error& e) {
      skipped.push_back(name + ": " + e.what());
    }
  };
  try {
    run_one("multiplier-bounds", [&] { return monitor_multiplier_bounds(trace); });
    run_one("qp-residuals", [&] { return monitor_qp_residuals(trace); });
    run_one("line-search", [&] { return monitor_line_search(trace); });
    run_one("merit", [&] { return monitor_merit_decrease(trace, cfg.solver.eta); });
    run_one("theta-tail", [&] { return monitor_theta_tail(trace); });
    run_one("slack-tail", [&] { return monitor_slack_tail(trace); });
    run_one("full-step", [&] { return monitor_full_step(trace); });
    run_one("step-bound",
            [&] { return monitor_step_lower_bound(trace, spec, cfg.solver.tau_alpha, b); });
    run_one("step-vanishing", [&] { return monitor_step_vanishing(trace, cfg.solver.eps); });
    run_one("kkt", [&] { return monitor_kkt(trace); });
    run_one("potential", [&] { return monitor_potential_descent(trace, spec, params, b); });
    run_one("subgradient", [&] { return monitor_subgradient_bound(trace, spec, params); });
    run_one("mfcq", [&] { return monitor_mfcq(trace, spec); });
  } catch (const PremiseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kPremise;
  }

  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    std::printf("%s  %-18s margin %+.3e  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.margin, r.detail.c_str());
  }
  for (const auto& s : skipped) {
    ok = false;
    std::printf("SKIP  %s\n", s.c_str());
  }
  if (!ok) return kCheckFailed;
  return status_exit(result.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-search SQP for nonsmooth upper-C2 objectives"};
  app.require_subcommand(1);

  RunFlags solve_flags;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run the solver and write a trace CSV");
  add_run_flags(solve_cmd, solve_flags);

  ValidateFlags validate_flags;
  CLI::App* validate_cmd = app.add_subcommand("validate", "sample the oracle inequalities");
  validate_cmd->add_option("problem", validate_flags.problem, "catalog problem name")->required();
  validate_cmd->add_option("--rho", validate_flags.rho, "override the upper-C2 modulus");
  validate_cmd->add_option("--lip-h", validate_flags.h, "override the Jacobian Lipschitz constant");
  validate_cmd->add_option("--samples", validate_flags.samples, "sample pairs")->capture_default_str();
  validate_cmd->add_option("--seed", validate_flags.seed, "sampling seed")->capture_default_str();
  validate_cmd->add_option("--tol", validate_flags.tol, "allowed violation")->capture_default_str();

  RateFlags rate_flags;
  CLI::App* rate_cmd = app.add_subcommand("rate", "fit an R-linear rate to a trace");
  rate_cmd->add_option("trace", rate_flags.trace, "trace CSV")->required();
  rate_cmd->add_option("--output", rate_flags.output, "per-k log-error CSV");
  rate_cmd->add_option("--from", rate_flags.from, "first row used in the fit")->capture_default_str();

  RunFlags monitor_run;
  MonitorFlagsCli monitor_flags;
  CLI::App* monitor_cmd = app.add_subcommand("monitor", "solve with diagnostics and report");
  add_run_flags(monitor_cmd, monitor_run);
  monitor_cmd->add_flag("--all", monitor_flags.all, "every applicable monitor");
  for (const auto& name : monitor_names()) {
    monitor_cmd->add_flag("--" + name, monitor_flags.selected[name], "run the " + name + " monitor");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  if (solve_cmd->parsed()) return cmd_solve(solve_flags);
  if (validate_cmd->parsed()) return cmd_validate(validate_flags);
  if (rate_cmd->parsed()) return cmd_rate(rate_flags);
  if (monitor_cmd->parsed()) return cmd_monitor(monitor_run, monitor_flags);
  return kBadConfig;
}
