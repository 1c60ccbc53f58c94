#pragma once

#include "nsqp/errors.hpp"
#include "nsqp/qp_subproblem.hpp"

namespace nsqp {

struct QpSolverSettings {
  double tolerance = 1e-10;  // KKT residual target, scaled by 1 + |g|_inf + theta
  int max_iterations = 200;
  double regularization = 1e-12;  // added to the slack block of the Hessian
};

/// Raised when the iteration cap is hit before the residual target.
class QpStallError : public Error {
 public:
  QpStallError(const std::string& what, QpSolution best, double residual)
      : Error(what), best_(std::move(best)), residual_(residual) {}

  const QpSolution& best() const { return best_; }
  double residual() const { return residual_; }

 private:
  QpSolution best_;
  double residual_;
};

/// Solves the elastic subproblem with a dense primal-dual interior-point
/// method (Mehrotra predictor-corrector), followed by an active-set polish.
QpSolution solve_qp(const QpData& qp, const QpSolverSettings& settings = {});

/// Max-norm residuals of the subproblem's KKT conditions, recomputed from the
/// data and the returned solution only.
struct QpResiduals {
  double stationarity = 0.0;    // g + B d - J^T lambda; slack stationarity
  double primal = 0.0;          // elastic rows, slack bounds
  double complementarity = 0.0; // products and multiplier signs

  double max() const;
};

QpResiduals residuals(const QpData& qp, const QpSolution& sol);

}  // namespace nsqp
