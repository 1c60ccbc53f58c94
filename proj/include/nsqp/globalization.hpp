#pragma once

#include <optional>

#include "nsqp/problem.hpp"

namespace nsqp {

/// l1 exact-penalty merit f(x) + theta * v(x).
double merit(const ProblemSpec& spec, const Vector& x, double theta);

struct LineSearchParams {
  double eta = 0.1;
  double tau_alpha = 0.5;
  double alpha_min = 1e-12;
};

struct LineSearchOutcome {
  double alpha = 1.0;
  int trials = 0;  // number of backtracks, alpha == tau_alpha^trials
  double achieved_decrease = 0.0;
  double model_decrease = 0.0;  // 1/2 d^T B d
  double merit_base = 0.0;
  double merit_trial = 0.0;
  Vector x_trial;
};

/// Backtracking on alpha in {1, tau, tau^2, ...} until
///   merit(x) - merit(x + alpha d) >= eta * alpha * 1/2 d^T B d.
/// Trial points outside the box or with non-finite merit are rejected.
/// Throws LineSearchFailure once alpha drops below alpha_min.
LineSearchOutcome line_search(const ProblemSpec& spec, const Vector& x, const Vector& d,
                              double theta, const Matrix& B, const LineSearchParams& params,
                              std::optional<double> merit_at_x = std::nullopt);

/// max(theta, |lambda|_inf + gamma).
double update_penalty(double theta, const Vector& lambda, double gamma);

}  // namespace nsqp
