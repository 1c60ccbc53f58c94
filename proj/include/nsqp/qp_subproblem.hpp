#pragma once

// Elastic (l1-relaxed) QP subproblem at an iterate x_k:
//
//   min_{d,v,w,t}  g^T d + 1/2 d^T B d + theta * (sum_E (v_i + w_i) + sum_I t_i)
//   s.t.           c_i + grad c_i^T d = v_i - w_i      i in E
//                  c_i + grad c_i^T d >= -t_i          i in I
//                  v, w, t >= 0
//
// The slacks make the subproblem feasible for any linearization.

#include <string>
#include <vector>

#include "nsqp/problem.hpp"

namespace nsqp {

struct QpData {
  Matrix B;
  Vector g;
  Vector c;
  Matrix J;
  double theta = 1.0;
  int eq_count = 0;
  int ineq_count = 0;
  double b_min = 0.0;  // smallest eigenvalue of B

  int n() const { return static_cast<int>(g.size()); }
  int m() const { return eq_count + ineq_count; }
};

enum class QpStatus { Solved, Stalled };

struct QpSolution {
  Vector d;
  Vector v, w;  // |E|
  Vector t;     // |I|
  Vector lambda;
  Vector p, q;  // |E|
  Vector r;     // |I|
  double qp_objective = 0.0;
  QpStatus status = QpStatus::Solved;
  int iterations = 0;
  bool polished = false;

  double max_slack() const;
};

struct ConstraintClassification {
  std::vector<int> consistent;    // A_k
  std::vector<int> inconsistent;  // V_k
  std::vector<int> signs;         // sigma_i for i in E, each in {-1, 0, 1}

  bool is_consistent(int i) const;
};

/// Builds the subproblem from an already evaluated point.
QpData assemble(const Evaluation& at_x, int eq_count, int ineq_count, const Matrix& B,
                double theta);
/// Evaluates the problem at x and builds the subproblem with subgradient g.
QpData assemble(const ProblemSpec& spec, const Vector& x, const Vector& g, const Matrix& B,
                double theta);

struct SlackMultipliers {
  Vector p, q, r;
};

/// p = theta + lambda_E, q = theta - lambda_E, r = theta - lambda_I.
SlackMultipliers recover_slack_multipliers(const Vector& lambda, int eq_count, double theta);

/// Dead-band used to call a slack zero: 1e-8 * max(1, theta).
double default_classification_tolerance(double theta);

ConstraintClassification classify(const QpData& qp, const QpSolution& sol, double tol);

/// Value of the QP objective (without the constant f(x_k)).
double qp_objective(const QpData& qp, const Vector& d, const Vector& v, const Vector& w,
                    const Vector& t);

struct MultiplierViolation {
  int index = -1;
  std::string rule;
  double value = 0.0;
};

struct MultiplierBoundReport {
  bool ok = true;
  double worst_excess = 0.0;
  std::vector<MultiplierViolation> violations;
};

/// Checks lambda against the bounds implied by the slack classification:
///   V^e: lambda_i = -sigma_i theta     A^e: |lambda_i| <= theta
///   V^i: lambda_i = theta              A^i: 0 <= lambda_i <= theta
MultiplierBoundReport check_multiplier_bounds(const ConstraintClassification& cls,
                                              const Vector& lambda, int eq_count, double theta,
                                              double tol);

}  // namespace nsqp
