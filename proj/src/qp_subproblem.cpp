#include "nsqp/qp_subproblem.hpp"

#include <algorithm>
#include <cmath>

#include "nsqp/errors.hpp"

namespace nsqp {

double QpSolution::max_slack() const {
  double s = 0.0;
  if (v.size() > 0) s = std::max(s, v.maxCoeff());
  if (w.size() > 0) s = std::max(s, w.maxCoeff());
  if (t.size() > 0) s = std::max(s, t.maxCoeff());
  return s;
}

bool ConstraintClassification::is_consistent(int i) const {
  return std::find(consistent.begin(), consistent.end(), i) != consistent.end();
}

QpData assemble(const Evaluation& at_x, int eq_count, int ineq_count, const Matrix& B,
                double theta) {
  const int n = static_cast<int>(at_x.g.size());
  const int m = eq_count + ineq_count;
  if (B.rows() != n || B.cols() != n) throw ContractError("assemble: B has wrong shape");
  if (at_x.c.size() != m || at_x.J.rows() != m || at_x.J.cols() != n) {
    throw ContractError("assemble: constraint data has wrong shape");
  }
  if (!B.allFinite() || !at_x.g.allFinite() || !at_x.c.allFinite() || !at_x.J.allFinite() ||
      !std::isfinite(theta)) {
    throw AssemblyError("assemble: non-finite entries");
  }
  if (!(theta > 0.0)) throw ContractError("assemble: theta must be positive");
  const double asym = (B - B.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, B.cwiseAbs().maxCoeff())) {
    throw ContractError("assemble: B is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(B, Eigen::EigenvaluesOnly);
  const double b_min = eig.eigenvalues().minCoeff();
  if (!(b_min > 0.0)) throw ContractError("assemble: B is not positive definite");

  QpData qp;
  qp.B = B;
  qp.g = at_x.g;
  qp.c = at_x.c;
  qp.J = at_x.J;
  qp.theta = theta;
  qp.eq_count = eq_count;
  qp.ineq_count = ineq_count;
  qp.b_min = b_min;
  return qp;
}

QpData assemble(const ProblemSpec& spec, const Vector& x, const Vector& g, const Matrix& B,
                double theta) {
  if (g.size() != spec.n) throw ContractError("assemble: subgradient has wrong size");
  ConstraintValues con = evaluate_constraints(spec, x);
  Evaluation at_x{0.0, g, std::move(con.values), std::move(con.jacobian)};
  return assemble(at_x, spec.eq_count, spec.ineq_count, B, theta);
}

SlackMultipliers recover_slack_multipliers(const Vector& lambda, int eq_count, double theta) {
  if (!(theta > 0.0)) throw ContractError("recover_slack_multipliers: theta must be positive");
  const int mi = static_cast<int>(lambda.size()) - eq_count;
  if (mi < 0) throw ContractError("recover_slack_multipliers: eq_count exceeds lambda size");
  SlackMultipliers out;
  const auto lam_e = lambda.head(eq_count).array();
  out.p = (theta + lam_e).matrix();
  out.q = (theta - lam_e).matrix();
  out.r = (theta - lambda.tail(mi).array()).matrix();
  return out;
}

double default_classification_tolerance(double theta) { return 1e-8 * std::max(1.0, theta); }

ConstraintClassification classify(const QpData& qp, const QpSolution& sol, double tol) {
  ConstraintClassification cls;
  const Vector lin = qp.c + qp.J * sol.d;
  cls.signs.resize(qp.eq_count, 0);
  for (int i = 0; i < qp.eq_count; ++i) {
    if (std::max(sol.v[i], sol.w[i]) <= tol) {
      cls.consistent.push_back(i);
    } else {
      cls.inconsistent.push_back(i);
    }
    if (std::abs(lin[i]) > tol) cls.signs[i] = lin[i] > 0.0 ? 1 : -1;
  }
  for (int j = 0; j < qp.ineq_count; ++j) {
    const int i = qp.eq_count + j;
    if (sol.t[j] <= tol) {
      cls.consistent.push_back(i);
    } else {
      cls.inconsistent.push_back(i);
    }
  }
  return cls;
}

double qp_objective(const QpData& qp, const Vector& d, const Vector& v, const Vector& w,
                    const Vector& t) {
  return qp.g.dot(d) + 0.5 * d.dot(qp.B * d) + qp.theta * (v.sum() + w.sum() + t.sum());
}

MultiplierBoundReport check_multiplier_bounds(const ConstraintClassification& cls,
                                              const Vector& lambda, int eq_count, double theta,
                                              double tol) {
  MultiplierBoundReport report;
  auto flag = [&](int i, const char* rule, double excess) {
    report.worst_excess = std::max(report.worst_excess, excess);
    if (excess > 0.0) {
      report.ok = false;
      report.violations.push_back(MultiplierViolation{i, rule, lambda[i]});
    }
  };
  for (int i : cls.inconsistent) {
    if (i < eq_count) {
      const double sigma = i < static_cast<int>(cls.signs.size()) ? cls.signs[i] : 0;
      flag(i, "V^e: lambda = -sigma*theta", std::abs(lambda[i] + sigma * theta) - tol);
    } else {
      flag(i, "V^i: lambda = theta", std::abs(lambda[i] - theta) - tol);
    }
  }
  for (int i : cls.consistent) {
    if (i < eq_count) {
      flag(i, "A^e: |lambda| <= theta", std::abs(lambda[i]) - theta - tol);
    } else {
      flag(i, "A^i: 0 <= lambda <= theta",
           std::max(-lambda[i] - tol, lambda[i] - theta - tol));
    }
  }
  return report;
}

}  // namespace nsqp
