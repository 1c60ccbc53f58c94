#include "nsqp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "nsqp/errors.hpp"

namespace nsqp {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

Vector sample_in_box(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    x[i] = box.lower[i] + unit(rng) * (box.upper[i] - box.lower[i]);
  }
  return x;
}

ObjectiveValue evaluate_objective(const ProblemSpec& spec, const Vector& x) {
  ObjectiveValue out = spec.objective(x);
  if (out.subgradient.size() != spec.n) {
    throw EvaluationError("objective oracle returned a subgradient of wrong size");
  }
  if (!std::isfinite(out.value) || !all_finite(out.subgradient)) {
    throw EvaluationError("objective oracle returned a non-finite value");
  }
  return out;
}

}  // namespace

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] - tol && x[i] <= upper[i] + tol)) return false;
  }
  return true;
}

Box Box::cube(int n, double lo, double hi) {
  return Box{Vector::Constant(n, lo), Vector::Constant(n, hi)};
}

ConstraintValues evaluate_constraints(const ProblemSpec& spec, const Vector& x) {
  if (spec.m() == 0) return ConstraintValues{Vector(0), Matrix(0, spec.n)};
  if (!spec.constraints) throw ContractError("problem declares constraints but no oracle");
  ConstraintValues out = spec.constraints(x);
  if (out.values.size() != spec.m() || out.jacobian.rows() != spec.m() ||
      out.jacobian.cols() != spec.n) {
    throw EvaluationError("constraint oracle returned wrong dimensions");
  }
  if (!all_finite(out.values) || !out.jacobian.allFinite()) {
    throw EvaluationError("constraint oracle returned a non-finite value");
  }
  return out;
}

Evaluation evaluate(const ProblemSpec& spec, const Vector& x) {
  if (x.size() != spec.n) throw ContractError("point has wrong dimension");
  if (!spec.box.contains(x)) throw DomainError("point lies outside the working box");
  ObjectiveValue obj = evaluate_objective(spec, x);
  ConstraintValues con = evaluate_constraints(spec, x);
  return Evaluation{obj.value, std::move(obj.subgradient), std::move(con.values),
                    std::move(con.jacobian)};
}

double constraint_violation(const ProblemSpec& spec, const Vector& c) {
  if (c.size() != spec.m()) throw ContractError("constraint vector has wrong size");
  double v = 0.0;
  for (int i = 0; i < spec.eq_count; ++i) v += std::abs(c[i]);
  for (int i = spec.eq_count; i < spec.m(); ++i) v += std::max(0.0, -c[i]);
  return v;
}

double KktReport::max() const {
  return std::max({stationarity, primal_eq, primal_ineq, complementarity, dual_sign});
}

KktReport kkt_residual(const ProblemSpec& spec, const Vector& g, const Vector& c,
                       const Matrix& J, const Vector& lambda) {
  if (g.size() != spec.n || c.size() != spec.m() || lambda.size() != spec.m() ||
      J.rows() != spec.m() || J.cols() != spec.n) {
    throw ContractError("kkt_residual: dimension mismatch");
  }
  KktReport r;
  Vector grad_l = g;
  if (spec.m() > 0) grad_l -= J.transpose() * lambda;
  r.stationarity = grad_l.norm();
  for (int i = 0; i < spec.eq_count; ++i) r.primal_eq = std::max(r.primal_eq, std::abs(c[i]));
  for (int i = spec.eq_count; i < spec.m(); ++i) {
    r.primal_ineq = std::max(r.primal_ineq, std::max(0.0, -c[i]));
    r.complementarity = std::max(r.complementarity, std::abs(lambda[i] * c[i]));
    r.dual_sign = std::max(r.dual_sign, std::max(0.0, -lambda[i]));
  }
  return r;
}

KktReport kkt_residual(const ProblemSpec& spec, const Vector& x, const Vector& g,
                       const Vector& lambda) {
  if (x.size() != spec.n) throw ContractError("kkt_residual: dimension mismatch");
  ConstraintValues con = evaluate_constraints(spec, x);
  return kkt_residual(spec, g, con.values, con.jacobian, lambda);
}

UpperC2Report validate_upper_c2(const ProblemSpec& spec, int sample_count, std::uint64_t seed,
                                std::optional<double> rho_override) {
  if (sample_count < 1) throw ContractError("validate_upper_c2: sample_count must be >= 1");
  std::mt19937_64 rng(seed);

  struct Sample {
    Vector x, xbar;
    double gap;  // f(x) - f(xbar) - <g, x - xbar>
    double dist2;
  };
  std::vector<Sample> samples;
  samples.reserve(sample_count);
  double rho_hat = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    Vector x = sample_in_box(spec.box, rng);
    Vector xbar = sample_in_box(spec.box, rng);
    ObjectiveValue at_x = evaluate_objective(spec, x);
    ObjectiveValue at_xbar = evaluate_objective(spec, xbar);
    const Vector diff = x - xbar;
    const double gap = at_x.value - at_xbar.value - at_xbar.subgradient.dot(diff);
    const double dist2 = diff.squaredNorm();
    if (dist2 > 0.0) rho_hat = std::max(rho_hat, 2.0 * gap / dist2);
    samples.push_back(Sample{std::move(x), std::move(xbar), gap, dist2});
  }

  UpperC2Report report;
  report.samples = sample_count;
  report.rho_estimate = rho_hat;
  report.rho_declared = rho_override.has_value() || spec.rho.has_value();
  report.rho_used = rho_override ? *rho_override : spec.rho.value_or(rho_hat);
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (const Sample& s : samples) {
    const double excess = s.gap - 0.5 * report.rho_used * s.dist2;
    if (excess > report.max_violation) {
      report.max_violation = excess;
      report.worst_x = s.x;
      report.worst_xbar = s.xbar;
    }
  }
  return report;
}

LinearizationReport validate_linearization(const ProblemSpec& spec, int sample_count,
                                           std::uint64_t seed, std::optional<double> h_override) {
  if (sample_count < 1) throw ContractError("validate_linearization: sample_count must be >= 1");
  LinearizationReport report;
  report.samples = sample_count;
  report.h_used = h_override ? *h_override : spec.lip_h.value_or(0.0);
  report.max_violation = spec.m() == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (spec.m() == 0) return report;

  std::mt19937_64 rng(seed);
  for (int s = 0; s < sample_count; ++s) {
    const Vector x = sample_in_box(spec.box, rng);
    const Vector xp = sample_in_box(spec.box, rng);
    const ConstraintValues at_x = evaluate_constraints(spec, x);
    const ConstraintValues at_xp = evaluate_constraints(spec, xp);
    const Vector diff = xp - x;
    const Vector err = at_xp.values - at_x.values - at_x.jacobian * diff;
    const double bound = 0.5 * report.h_used * diff.squaredNorm();
    for (int i = 0; i < spec.m(); ++i) {
      const double excess = std::abs(err[i]) - bound;
      if (excess > report.max_violation) {
        report.max_violation = excess;
        report.worst_x = x;
        report.worst_xprime = xp;
        report.worst_row = i;
      }
    }
  }
  return report;
}

}  // namespace nsqp
