#pragma once

// Problem interface for nonsmooth constrained programs
//
//   min f(x)  s.t.  c_i(x) = 0 (i in E),  c_i(x) >= 0 (i in I)
//
// with f upper-C2 (a min of smooth pieces locally) and c_i smooth.
// Constraint vectors are always ordered E first, then I.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace nsqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kBoxTolerance = 1e-9;

/// Axis-aligned compact working box.
struct Box {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x, double tol = kBoxTolerance) const;
  static Box cube(int n, double lo, double hi);
};

struct ObjectiveValue {
  double value = 0.0;
  Vector subgradient;
};

struct ConstraintValues {
  Vector values;    // m entries, E then I
  Matrix jacobian;  // m x n, row i is grad c_i(x)^T
};

using ObjectiveOracle = std::function<ObjectiveValue(const Vector&)>;
using ConstraintOracle = std::function<ConstraintValues(const Vector&)>;
using HessianOracle = std::function<std::vector<Matrix>(const Vector&)>;

struct ReferenceSolution {
  std::vector<Vector> minimizers;  // symmetric problems may list several
  double objective = 0.0;
};

struct ProblemSpec {
  int n = 0;
  int eq_count = 0;
  int ineq_count = 0;
  ObjectiveOracle objective;
  ConstraintOracle constraints;  // may be empty when there are no constraints
  HessianOracle hessians;        // optional
  std::optional<double> rho;     // upper-C2 modulus on the box
  std::optional<double> lip_h;   // Lipschitz constant of the constraint gradients
  Box box;
  // True when every constraint is affine; enables exact linear-manifold grids.
  bool affine_constraints = false;
  std::optional<ReferenceSolution> reference;

  int m() const { return eq_count + ineq_count; }
};

/// Oracle outputs bundled at one point.
struct Evaluation {
  double f = 0.0;
  Vector g;
  Vector c;
  Matrix J;
};

/// Evaluates objective and constraints at x. Throws DomainError when x is
/// outside the box and EvaluationError on non-finite oracle output.
Evaluation evaluate(const ProblemSpec& spec, const Vector& x);

/// Constraint values and Jacobian only (empty when m == 0).
ConstraintValues evaluate_constraints(const ProblemSpec& spec, const Vector& x);

/// l1 violation: sum |c_E| + sum [c_I]^-.
double constraint_violation(const ProblemSpec& spec, const Vector& c);

struct KktReport {
  double stationarity = 0.0;
  double primal_eq = 0.0;
  double primal_ineq = 0.0;
  double complementarity = 0.0;
  double dual_sign = 0.0;

  double max() const;
};

/// KKT residuals of (x, lambda) using g as the subgradient witness.
KktReport kkt_residual(const ProblemSpec& spec, const Vector& x, const Vector& g,
                       const Vector& lambda);
KktReport kkt_residual(const ProblemSpec& spec, const Vector& g, const Vector& c,
                       const Matrix& J, const Vector& lambda);

struct UpperC2Report {
  double max_violation = 0.0;
  Vector worst_x;
  Vector worst_xbar;
  double rho_used = 0.0;
  // Smallest modulus satisfying every sampled inequality.
  double rho_estimate = 0.0;
  bool rho_declared = false;
  int samples = 0;
};

/// Samples pairs (x, xbar) uniformly in the box and reports the largest
///   f(x) - f(xbar) - <g(xbar), x - xbar> - (rho/2)|x - xbar|^2.
/// A positive maximum is a finding. When the problem declares no rho and no
/// override is given, the estimate is used as rho.
UpperC2Report validate_upper_c2(const ProblemSpec& spec, int sample_count, std::uint64_t seed,
                                std::optional<double> rho_override = std::nullopt);

struct LinearizationReport {
  double max_violation = 0.0;
  Vector worst_x;
  Vector worst_xprime;
  int worst_row = -1;
  double h_used = 0.0;
  int samples = 0;
};

/// Largest |c_i(x') - c_i(x) - grad c_i(x)^T (x'-x)| - (H/2)|x'-x|^2 over
/// sampled pairs and rows.
LinearizationReport validate_linearization(const ProblemSpec& spec, int sample_count,
                                           std::uint64_t seed,
                                           std::optional<double> h_override = std::nullopt);

}  // namespace nsqp
