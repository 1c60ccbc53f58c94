#include "nsqp/globalization.hpp"

#include <algorithm>
#include <cmath>

#include "nsqp/errors.hpp"

namespace nsqp {

double merit(const ProblemSpec& spec, const Vector& x, double theta) {
  if (!(theta > 0.0)) throw ContractError("merit: theta must be positive");
  const Evaluation e = evaluate(spec, x);
  return e.f + theta * constraint_violation(spec, e.c);
}

LineSearchOutcome line_search(const ProblemSpec& spec, const Vector& x, const Vector& d,
                              double theta, const Matrix& B, const LineSearchParams& params,
                              std::optional<double> merit_at_x) {
  if (!(params.eta > 0.0 && params.eta < 1.0)) throw ContractError("line_search: eta not in (0,1)");
  if (!(params.tau_alpha > 0.0 && params.tau_alpha < 1.0)) {
    throw ContractError("line_search: tau_alpha not in (0,1)");
  }
  if (!(params.alpha_min > 0.0)) throw ContractError("line_search: alpha_min must be positive");
  if (d.size() != x.size() || d.isZero(0.0)) throw ContractError("line_search: d must be nonzero");

  LineSearchOutcome out;
  out.model_decrease = 0.5 * d.dot(B * d);
  out.merit_base = merit_at_x ? *merit_at_x : merit(spec, x, theta);

  for (int trial = 0;; ++trial) {
    const double alpha = std::pow(params.tau_alpha, trial);
    if (alpha < params.alpha_min) break;
    Vector xt = x + alpha * d;
    if (!spec.box.contains(xt)) continue;
    double mt = 0.0;
    try {
      mt = merit(spec, xt, theta);
    } catch (const EvaluationError&) {
      continue;
    }
    if (!std::isfinite(mt)) continue;
    const double decrease = out.merit_base - mt;
    if (decrease >= params.eta * alpha * out.model_decrease) {
      out.alpha = alpha;
      out.trials = trial;
      out.achieved_decrease = decrease;
      out.merit_trial = mt;
      out.x_trial = std::move(xt);
      return out;
    }
  }
  throw LineSearchFailure("line search: step size fell below alpha_min");
}

double update_penalty(double theta, const Vector& lambda, double gamma) {
  if (!(theta > 0.0) || !(gamma > 0.0)) {
    throw ContractError("update_penalty: theta and gamma must be positive");
  }
  const double lam_inf = lambda.size() > 0 ? lambda.lpNorm<Eigen::Infinity>() : 0.0;
  return std::max(theta, lam_inf + gamma);
}

}  // namespace nsqp
