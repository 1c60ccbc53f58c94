#pragma once

// Diagnostics on solver traces: a grid conjugate of F = -f + (sigma/2)|x|^2
// on a box, the potential function
//
//   L(x, y, w) = -y^T x + F*(y) + (sigma/2)|x|^2 + (l/2)|x - w|^2 + i_C(x, w),
//
// where C holds (x, w) whose linearization at w is feasible, plus descent
// and subgradient monitors, trace-level checks, rate fitting and MFCQ.

#include <optional>
#include <string>
#include <vector>

#include "nsqp/driver.hpp"
#include "nsqp/problem.hpp"

namespace nsqp {

/// Error budget for every check that involves the grid conjugate.
inline constexpr double kGridErrorBudget = 1e-4;

struct PotentialParams {
  double sigma = 0.0;
  double ell = 0.0;
  Box box;
  int grid_points_per_dim = 1001;
  double refine_spacing = 1e-5;
  double c_b = 0.5;  // used only for nonlinear constraints
};

/// sigma = rho + 1; l = min(2b - sigma, b), raised above c_b b for nonlinear
/// constraints with c_b = theta_bar m H / b.
PotentialParams default_potential_params(const ProblemSpec& spec, double b, double theta_bar);

/// Violated premises of the descent lemmas, each as a readable inequality.
/// Affine: 2b >= sigma + l and b >= sigma >= rho, sigma > rho.
/// Nonlinear additionally: 0 < c_b < 1 and l > c_b b.
std::vector<std::string> potential_premise_violations(const ProblemSpec& spec,
                                                      const PotentialParams& params, double b);

/// F*(y) = sup_{x in box} <y, x> - F(x), approximated by a coarse grid argmax
/// followed by zoom refinement to `refine_spacing`. F is strongly convex for
/// sigma > rho, so the refined maximizer is unique. Grid values of F are
/// computed once and shared across queries.
class ConjugateOracle {
 public:
  /// Throws UnsupportedDimensionError for n > 2 and ContractError for
  /// invalid parameters.
  ConjugateOracle(const ProblemSpec& spec, const PotentialParams& params);

  double F(const Vector& x) const;
  double operator()(const Vector& y) const;
  /// Maximizer of the last refinement level.
  Vector argmax(const Vector& y) const;

 private:
  double refine(const Vector& y, Vector* where) const;

  const ProblemSpec* spec_;
  PotentialParams params_;
  int points_;
  Vector spacing_;
  std::vector<Vector> nodes_;
  std::vector<double> values_;  // F at nodes_
};

double conjugate_value(const ProblemSpec& spec, const PotentialParams& params, const Vector& y);

/// +infinity when the linearized constraints at w fail at x (equalities to
/// 1e-8, inequalities to -1e-8).
double potential_value(const ProblemSpec& spec, const PotentialParams& params, const Vector& x,
                       const Vector& y, const Vector& w);
double potential_value(const ProblemSpec& spec, const ConjugateOracle& conj,
                       const PotentialParams& params, const Vector& x, const Vector& y,
                       const Vector& w);

struct DescentStep {
  int k = 0;
  double L_k = 0.0;
  double L_next = 0.0;
  double difference = 0.0;  // L_k - L_next
  double c_d = 0.0;         // 2 difference / |x_k - x_{k-1}|^2, 0 when the step is 0
};

struct DescentReport {
  double min_margin = 0.0;
  int tail_start = 0;
  std::vector<DescentStep> steps;
};

/// Evaluates L(x_k, z_{k-1}, x_{k-1}) - L(x_{k+1}, z_k, x_k), z_k = -g_k + sigma x_k,
/// over the tail where every QP slack is below 1e-10. Throws PremiseError
/// listing violated premises and InsufficientDataError when the tail has no
/// complete triple.
DescentReport potential_descent_check(const std::vector<IterationRecord>& trace,
                                      const ProblemSpec& spec, const PotentialParams& params,
                                      double b);

struct SubgradientBound {
  Vector vector;  // 3n entries
  double ratio = 0.0;
  // F(x_k) + F*(z_k) - <z_k, x_k>; present for n <= 2.
  std::optional<double> fenchel_young_residual;
};

/// ((sigma I - B) d; -d; -l d - sum_i lambda_i Hess c_i(x_k) d) with d = x_{k+1} - x_k.
/// Throws CapabilityError when the problem has no Hessian oracle.
SubgradientBound subgradient_bound_vector(const ProblemSpec& spec, const IterationRecord& rec_k,
                                          const IterationRecord& rec_k1, const Matrix& B,
                                          const PotentialParams& params,
                                          const ConjugateOracle* conj = nullptr);

/// sqrt((sigma + |B|)^2 + 1 + (l + |lambda|_1 max|Hess c|)^2).
double subgradient_ratio_bound(double sigma, double B_norm, double ell, double lambda_l1,
                               double hessian_norm);

struct RateFit {
  double q0 = 0.0;
  double q1 = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least squares of log(error_k) against k. Throws InsufficientDataError for
/// fewer than 3 points and ContractError for non-positive errors.
RateFit fit_linear_rate(const std::vector<double>& errors);

/// |x_k - x_last| for every record but the last, with exact zeros dropped.
std::vector<double> tail_errors(const std::vector<Vector>& iterates);

struct MfcqResult {
  bool holds = false;
  std::optional<Vector> witness;
  std::string reason;
};

/// Rank test on the equality gradients, then the auxiliary QP
/// min 1/2|w|^2 s.t. grad c_E^T w = 0, grad c_i^T w >= 1 on active rows.
MfcqResult check_mfcq(const ProblemSpec& spec, const Vector& x, double active_tol);

// ---------------------------------------------------------------------------
// Trace monitors

struct MonitorResult {
  std::string name;
  bool passed = true;
  double margin = 0.0;  // >= 0 when passed
  std::string detail;
};

MonitorResult monitor_multiplier_bounds(const std::vector<IterationRecord>& trace);
MonitorResult monitor_qp_residuals(const std::vector<IterationRecord>& trace);
MonitorResult monitor_line_search(const std::vector<IterationRecord>& trace);
/// merit_k - merit_{k+1} >= eta alpha_k 1/2 d^T B d - slack wherever theta is unchanged.
MonitorResult monitor_merit_decrease(const std::vector<IterationRecord>& trace, double eta,
                                     double slack = 1e-12);
/// theta constant over the final `fraction` of records.
MonitorResult monitor_theta_tail(const std::vector<IterationRecord>& trace,
                                 double fraction = 0.5);
/// Max QP slack <= tol over the final `window` records.
MonitorResult monitor_slack_tail(const std::vector<IterationRecord>& trace, int window = 20,
                                 double tol = 1e-10);
/// alpha = 1 on every step after the first record with max slack <= tol.
MonitorResult monitor_full_step(const std::vector<IterationRecord>& trace, double tol = 1e-10);
/// Accepted alpha >= tau^max(0, ceil(log_tau(b / (rho + theta m H)))) where theta is constant.
/// Throws CapabilityError when rho or H is not declared.
MonitorResult monitor_step_lower_bound(const std::vector<IterationRecord>& trace,
                                       const ProblemSpec& spec, double tau, double b);
/// Final |d| <= eps, and over the last 10 records either max |d| <= 10 eps
/// or |d| is non-increasing. The 10 eps bound alone fails for runs that
/// contract faster than a factor 10 per 9 steps.
MonitorResult monitor_step_vanishing(const std::vector<IterationRecord>& trace, double eps);
/// Final KKT fields <= tol.
MonitorResult monitor_kkt(const std::vector<IterationRecord>& trace, double tol = 1e-6);

/// Potential descent over the slack-free tail; passes when every
/// difference is >= -kGridErrorBudget.
MonitorResult monitor_potential_descent(const std::vector<IterationRecord>& trace,
                                        const ProblemSpec& spec, const PotentialParams& params,
                                        double b);
/// Over the slack-free tail: the subgradient ratio stays below the bound
/// built from the run's own sigma, |B|, l, |lambda|_1 and Hessian norms, and
/// the Fenchel-Young residual at (x_k, z_k) is within kGridErrorBudget.
MonitorResult monitor_subgradient_bound(const std::vector<IterationRecord>& trace,
                                        const ProblemSpec& spec, const PotentialParams& params);
/// MFCQ at the final iterate.
MonitorResult monitor_mfcq(const std::vector<IterationRecord>& trace, const ProblemSpec& spec,
                           double active_tol = 1e-6);

}  // namespace nsqp
