#include "nsqp/driver.hpp"

#include <algorithm>
#include <cmath>

#include "nsqp/errors.hpp"

namespace nsqp {

Matrix update_B(const BRule& rule, int k, int n) {
  const double b = std::visit(
      [k](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FixedB>) {
          return r.b;
        } else {
          return k < r.switch_iter ? r.b_early : r.b_late;
        }
      },
      rule);
  return b * Matrix::Identity(n, n);
}

double rule_lower_bound(const BRule& rule) {
  if (const auto* fixed = std::get_if<FixedB>(&rule)) return fixed->b;
  const auto& two = std::get<TwoPhaseB>(rule);
  return std::min(two.b_early, two.b_late);
}

void SolverConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0,1)");
  if (!(tau_alpha > 0.0 && tau_alpha < 1.0)) throw ConfigError("tau_alpha must lie in (0,1)");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(theta0 > 0.0)) throw ConfigError("theta0 must be positive");
  if (!(eps > 0.0) || !(eps_c > 0.0)) throw ConfigError("eps and eps_c must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(alpha_min > 0.0)) throw ConfigError("alpha_min must be positive");
  if (!(rule_lower_bound(b_rule) > 0.0)) throw ConfigError("b values must be positive");
  if (const auto* two = std::get_if<TwoPhaseB>(&b_rule); two && two->switch_iter < 0) {
    throw ConfigError("switch_iter must be >= 0");
  }
  if (!(qp.tolerance > 0.0) || qp.max_iterations < 1) throw ConfigError("invalid QP settings");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::QpStall: return "qp-stall";
    case SolveStatus::LineSearchFailure: return "line-search-failure";
    case SolveStatus::OracleError: return "oracle-error";
  }
  return "unknown";
}

SolveResult solve(const ProblemSpec& spec, const Vector& x0, const SolverConfig& config) {
  config.validate();
  if (x0.size() != spec.n) throw ContractError("solve: x0 has wrong dimension");
  if (!spec.box.contains(x0)) throw DomainError("solve: x0 lies outside the working box");

  SolveResult result;
  Vector x = x0;
  double theta = config.theta0;
  const LineSearchParams ls_params{config.eta, config.tau_alpha, config.alpha_min};
  const double bound_tol = 100.0 * config.qp.tolerance;

  for (int k = 0; k < config.max_iter; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.x = x;
    rec.theta_qp = theta;

    Evaluation at_x;
    try {
      at_x = evaluate(spec, x);
    } catch (const Error& e) {
      result.status = SolveStatus::OracleError;
      result.message = e.what();
      return result;
    }
    rec.f = at_x.f;
    rec.g = at_x.g;
    rec.v = constraint_violation(spec, at_x.c);

    const Matrix B = update_B(config.b_rule, k, spec.n);
    const QpData qp = assemble(at_x, spec.eq_count, spec.ineq_count, B, theta);
    rec.b_min = qp.b_min;

    QpSolution sol;
    try {
      sol = solve_qp(qp, config.qp);
    } catch (const QpStallError& e) {
      result.status = SolveStatus::QpStall;
      result.message = e.what();
      return result;
    } catch (const NumericalError& e) {
      result.status = SolveStatus::QpStall;
      result.message = e.what();
      return result;
    }

    rec.d = sol.d;
    rec.step_norm = sol.d.norm();
    rec.lambda = sol.lambda;
    rec.lambda_inf = sol.lambda.size() > 0 ? sol.lambda.lpNorm<Eigen::Infinity>() : 0.0;
    rec.max_slack = sol.max_slack();
    rec.classification = classify(qp, sol, default_classification_tolerance(theta));
    rec.kkt = kkt_residual(spec, at_x.g, at_x.c, at_x.J, sol.lambda);

    if (config.monitors.multiplier_bounds) {
      const MultiplierBoundReport mb =
          check_multiplier_bounds(rec.classification, sol.lambda, spec.eq_count, theta, bound_tol);
      rec.monitor_flags.multiplier_bounds_ok = mb.ok;
      rec.monitor_flags.multiplier_excess = mb.worst_excess;
    }
    if (config.monitors.qp_residuals) {
      const double res = residuals(qp, sol).max();
      rec.monitor_flags.qp_residual = res;
      rec.monitor_flags.qp_residual_ok =
          res <= 10.0 * config.qp.tolerance * (1.0 + qp.g.lpNorm<Eigen::Infinity>() + theta);
    }

    if (rec.step_norm <= config.eps && rec.v <= config.eps_c) {
      rec.theta = theta;
      rec.merit = at_x.f + theta * rec.v;
      rec.merit_next = rec.merit;
      result.trace.push_back(std::move(rec));
      result.status = SolveStatus::Converged;
      result.message = "step and violation below tolerance";
      return result;
    }

    theta = update_penalty(theta, sol.lambda, config.gamma);
    rec.theta = theta;
    rec.merit = at_x.f + theta * rec.v;

    LineSearchOutcome ls;
    try {
      ls = line_search(spec, x, sol.d, theta, B, ls_params, rec.merit);
    } catch (const LineSearchFailure& e) {
      rec.monitor_flags.line_search_ok = false;
      result.trace.push_back(std::move(rec));
      result.status = SolveStatus::LineSearchFailure;
      result.message = e.what();
      return result;
    }
    rec.alpha = ls.alpha;
    rec.trials = ls.trials;
    rec.model_decrease = ls.model_decrease;
    rec.achieved_decrease = ls.achieved_decrease;
    rec.merit_next = ls.merit_trial;

    if (config.monitors.line_search) {
      // Independent recomputation of both merit values.
      double base = 0.0;
      double next = 0.0;
      try {
        base = merit(spec, x, theta);
        next = merit(spec, ls.x_trial, theta);
      } catch (const Error& e) {
        result.trace.push_back(std::move(rec));
        result.status = SolveStatus::OracleError;
        result.message = e.what();
        return result;
      }
      rec.monitor_flags.line_search_margin =
          (base - next) - config.eta * ls.alpha * ls.model_decrease;
      rec.monitor_flags.line_search_ok = rec.monitor_flags.line_search_margin >= -1e-12;
    }

    x = std::move(ls.x_trial);
    result.trace.push_back(std::move(rec));
  }

  result.status = SolveStatus::MaxIterations;
  result.message = "iteration cap reached";
  return result;
}

}  // namespace nsqp
