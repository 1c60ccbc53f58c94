#pragma once

// Line-search SQP driver for nonsmooth upper-C2 objectives.
//
// Each iteration: evaluate f, g in the Clarke subdifferential, and the
// constraints; solve the elastic QP for (d, lambda); stop when |d| <= eps and
// v(x) <= eps_c; raise theta to max(theta, |lambda|_inf + gamma); backtrack
// on the l1 merit; step; update B.

#include <string>
#include <variant>
#include <vector>

#include "nsqp/globalization.hpp"
#include "nsqp/problem.hpp"
#include "nsqp/qp_solver.hpp"
#include "nsqp/qp_subproblem.hpp"

namespace nsqp {

/// B_k = b I for every k.
struct FixedB {
  double b = 1.0;
};

/// B_k = b_early I for k < switch_iter, then b_late I.
struct TwoPhaseB {
  double b_early = 1.0;
  double b_late = 1e6;
  int switch_iter = 100;
};

using BRule = std::variant<FixedB, TwoPhaseB>;

Matrix update_B(const BRule& rule, int k, int n);
/// Smallest eigenvalue of any B the rule produces.
double rule_lower_bound(const BRule& rule);

/// In-loop diagnostics recorded on every iteration.
struct MonitorSet {
  bool multiplier_bounds = true;
  bool qp_residuals = true;
  bool line_search = true;
};

struct SolverConfig {
  double eta = 0.1;
  double tau_alpha = 0.5;
  double gamma = 1e-2;
  double theta0 = 1.0;
  double eps = 1e-8;
  double eps_c = 1e-8;
  int max_iter = 500;
  double alpha_min = 1e-12;
  BRule b_rule = FixedB{1.0};
  QpSolverSettings qp;
  MonitorSet monitors;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

struct MonitorFlags {
  bool multiplier_bounds_ok = true;
  double multiplier_excess = 0.0;
  bool qp_residual_ok = true;
  double qp_residual = 0.0;
  bool line_search_ok = true;
  double line_search_margin = 0.0;
};

struct IterationRecord {
  int k = 0;
  Vector x;
  double f = 0.0;
  Vector g;
  double v = 0.0;
  double merit = 0.0;     // merit(x_k, theta)
  double theta_qp = 0.0;  // theta_k used in the subproblem
  double theta = 0.0;     // theta_{k+1}, used in the line search
  double alpha = 0.0;     // 0 on the terminating record (no step taken)
  int trials = 0;
  Vector d;
  double step_norm = 0.0;
  Vector lambda;
  double lambda_inf = 0.0;
  double max_slack = 0.0;
  double b_min = 0.0;
  double model_decrease = 0.0;
  double achieved_decrease = 0.0;
  double merit_next = 0.0;
  ConstraintClassification classification;
  KktReport kkt;
  MonitorFlags monitor_flags;
};

enum class SolveStatus { Converged, MaxIterations, QpStall, LineSearchFailure, OracleError };

std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;
  std::vector<IterationRecord> trace;

  bool converged() const { return status == SolveStatus::Converged; }
  const IterationRecord& final_record() const { return trace.back(); }
};

/// Runs the SQP iteration from x0. Errors abort with the partial trace and a
/// distinct status rather than throwing; only invalid configuration throws.
SolveResult solve(const ProblemSpec& spec, const Vector& x0, const SolverConfig& config);

}  // namespace nsqp
