#include "nsqp/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace nsqp {

namespace {

// Generic dense convex QP
//   min 1/2 z^T Q z + q^T z   s.t.  A z = b,  G z - h = s >= 0
// with Lagrangian 1/2 z^T Q z + q^T z - y^T (A z - b) - mu^T (G z - h).
struct DenseQp {
  Matrix Q;
  Vector q;
  Matrix A;
  Vector b;
  Matrix G;
  Vector h;
};

struct PrimalDual {
  Vector z, y, s, mu;
};

struct Residual {
  Vector dual, eq, ineq;
  double comp = 0.0;
  double sign = 0.0;  // negativity of s or mu

  double max() const {
    double r = std::max(comp, sign);
    if (dual.size() > 0) r = std::max(r, dual.lpNorm<Eigen::Infinity>());
    if (eq.size() > 0) r = std::max(r, eq.lpNorm<Eigen::Infinity>());
    if (ineq.size() > 0) r = std::max(r, ineq.lpNorm<Eigen::Infinity>());
    return r;
  }
};

Residual residual_of(const DenseQp& qp, const PrimalDual& pd) {
  Residual r;
  r.dual = qp.Q * pd.z + qp.q - qp.A.transpose() * pd.y - qp.G.transpose() * pd.mu;
  r.eq = qp.A * pd.z - qp.b;
  r.ineq = qp.G * pd.z - pd.s - qp.h;
  for (int j = 0; j < pd.s.size(); ++j) {
    r.comp = std::max(r.comp, std::abs(pd.s[j] * pd.mu[j]));
    r.sign = std::max({r.sign, -pd.s[j], -pd.mu[j]});
  }
  return r;
}

// Elastic variable layout: z = [d; v; w; t].
DenseQp to_dense(const QpData& qp, double reg) {
  const int n = qp.n();
  const int me = qp.eq_count;
  const int mi = qp.ineq_count;
  const int nz = n + 2 * me + mi;
  const int nineq = mi + 2 * me + mi;

  DenseQp out;
  out.Q = Matrix::Zero(nz, nz);
  out.Q.topLeftCorner(n, n) = qp.B;
  for (int j = n; j < nz; ++j) out.Q(j, j) = reg;
  out.q = Vector::Constant(nz, qp.theta);
  out.q.head(n) = qp.g;

  out.A = Matrix::Zero(me, nz);
  out.b = -qp.c.head(me);
  if (me > 0) {
    out.A.leftCols(n) = qp.J.topRows(me);
    out.A.block(0, n, me, me) = -Matrix::Identity(me, me);
    out.A.block(0, n + me, me, me) = Matrix::Identity(me, me);
  }

  out.G = Matrix::Zero(nineq, nz);
  out.h = Vector::Zero(nineq);
  if (mi > 0) {
    out.G.topLeftCorner(mi, n) = qp.J.bottomRows(mi);
    out.G.block(0, n + 2 * me, mi, mi) = Matrix::Identity(mi, mi);
    out.h.head(mi) = -qp.c.tail(mi);
  }
  out.G.block(mi, n, 2 * me + mi, 2 * me + mi) = Matrix::Identity(2 * me + mi, 2 * me + mi);
  return out;
}

PrimalDual initial_point(const QpData& qp, const DenseQp& dense) {
  const int n = qp.n();
  const int me = qp.eq_count;
  const int mi = qp.ineq_count;
  PrimalDual pd;
  pd.z = Vector::Zero(dense.q.size());
  for (int i = 0; i < me; ++i) {
    pd.z[n + i] = std::max(qp.c[i], 0.0) + 1.0;
    pd.z[n + me + i] = std::max(-qp.c[i], 0.0) + 1.0;
  }
  for (int j = 0; j < mi; ++j) {
    pd.z[n + 2 * me + j] = std::max(std::abs(qp.c[me + j]), 1.0) + std::max(-qp.c[me + j], 0.0);
  }
  pd.s = (dense.G * pd.z - dense.h).cwiseMax(1.0);
  pd.y = Vector::Zero(me);
  pd.mu = Vector::Constant(dense.h.size(), 0.5 * qp.theta);
  return pd;
}

double max_step(const Vector& x, const Vector& dx) {
  double alpha = 1.0;
  for (int j = 0; j < x.size(); ++j) {
    if (dx[j] < 0.0) alpha = std::min(alpha, -x[j] / dx[j]);
  }
  return alpha;
}

struct Direction {
  Vector dz, dy, ds, dmu;
};

// Newton direction for the perturbed KKT system with complementarity target rc.
Direction newton_direction(const DenseQp& qp, const PrimalDual& pd, const Residual& r,
                           const Eigen::PartialPivLU<Matrix>& lu, const Vector& rc) {
  const int nz = static_cast<int>(pd.z.size());
  const int me = static_cast<int>(pd.y.size());
  const Vector scaled = ((rc.array() + pd.mu.array() * r.ineq.array()) / pd.s.array()).matrix();
  Vector rhs(nz + me);
  rhs.head(nz) = -r.dual - qp.G.transpose() * scaled;
  rhs.tail(me) = -r.eq;
  const Vector sol = lu.solve(rhs);
  Direction dir;
  dir.dz = sol.head(nz);
  dir.dy = sol.tail(me);
  dir.ds = qp.G * dir.dz + r.ineq;
  dir.dmu = (-(rc.array() + pd.mu.array() * dir.ds.array()) / pd.s.array()).matrix();
  return dir;
}

// Fixes the guessed active set and solves the resulting equality-constrained
// KKT system exactly.
std::optional<PrimalDual> polish(const DenseQp& qp, const PrimalDual& pd) {
  const int nz = static_cast<int>(pd.z.size());
  const int me = static_cast<int>(pd.y.size());
  std::vector<int> active;
  for (int j = 0; j < pd.s.size(); ++j) {
    if (pd.s[j] < pd.mu[j]) active.push_back(j);
  }
  const int na = static_cast<int>(active.size());
  const int dim = nz + me + na;
  Matrix K = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  K.topLeftCorner(nz, nz) = qp.Q;
  K.block(0, nz, nz, me) = -qp.A.transpose();
  K.block(nz, 0, me, nz) = qp.A;
  rhs.head(nz) = -qp.q;
  rhs.segment(nz, me) = qp.b;
  for (int a = 0; a < na; ++a) {
    const int j = active[a];
    K.block(0, nz + me + a, nz, 1) = -qp.G.row(j).transpose();
    K.block(nz + me + a, 0, 1, nz) = qp.G.row(j);
    rhs[nz + me + a] = qp.h[j];
  }
  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible()) return std::nullopt;
  Vector sol = lu.solve(rhs);
  sol += lu.solve(rhs - K * sol);  // one step of iterative refinement
  if (!sol.allFinite()) return std::nullopt;

  PrimalDual out;
  out.z = sol.head(nz);
  out.y = sol.segment(nz, me);
  out.mu = Vector::Zero(pd.mu.size());
  for (int a = 0; a < na; ++a) out.mu[active[a]] = sol[nz + me + a];
  // Active simple bounds z_i >= 0 hold exactly; round-off there would be
  // amplified by theta in the objective.
  for (int j : active) {
    Eigen::Index i = 0;
    if (qp.h[j] == 0.0 && qp.G.row(j).cwiseAbs().sum() == 1.0 && qp.G.row(j).maxCoeff(&i) == 1.0) {
      out.z[i] = 0.0;
    }
  }
  out.s = qp.G * out.z - qp.h;
  for (int j : active) out.s[j] = 0.0;
  return out;
}

QpSolution to_solution(const QpData& qp, const PrimalDual& pd) {
  const int n = qp.n();
  const int me = qp.eq_count;
  const int mi = qp.ineq_count;
  QpSolution sol;
  sol.d = pd.z.head(n);
  sol.v = pd.z.segment(n, me);
  sol.w = pd.z.segment(n + me, me);
  sol.t = pd.z.segment(n + 2 * me, mi);
  sol.lambda.resize(me + mi);
  sol.lambda.head(me) = pd.y;
  sol.lambda.tail(mi) = pd.mu.head(mi);
  SlackMultipliers pqr = recover_slack_multipliers(sol.lambda, me, qp.theta);
  sol.p = std::move(pqr.p);
  sol.q = std::move(pqr.q);
  sol.r = std::move(pqr.r);
  sol.qp_objective = qp_objective(qp, sol.d, sol.v, sol.w, sol.t);
  return sol;
}

}  // namespace

double QpResiduals::max() const { return std::max({stationarity, primal, complementarity}); }

QpSolution solve_qp(const QpData& qp, const QpSolverSettings& settings) {
  if (!(settings.tolerance > 0.0) || settings.max_iterations < 1) {
    throw ContractError("solve_qp: invalid settings");
  }
  if (!(qp.theta > 0.0)) throw ContractError("solve_qp: theta must be positive");

  const DenseQp dense = to_dense(qp, settings.regularization);
  const double scale = 1.0 + (qp.g.size() > 0 ? qp.g.lpNorm<Eigen::Infinity>() : 0.0) + qp.theta;
  const double target = settings.tolerance * scale;
  const int nz = static_cast<int>(dense.q.size());
  const int me = static_cast<int>(dense.b.size());
  const int nineq = static_cast<int>(dense.h.size());

  PrimalDual pd = initial_point(qp, dense);
  PrimalDual best = pd;
  double best_res = residual_of(dense, pd).max();
  int iter = 0;

  if (nineq > 0) {
    for (; iter < settings.max_iterations; ++iter) {
      const Residual r = residual_of(dense, pd);
      const double res = r.max();
      if (!std::isfinite(res)) throw NumericalError("solve_qp: non-finite residual");
      if (res < best_res) {
        best_res = res;
        best = pd;
      }
      if (res <= target) break;

      const double gap = pd.s.dot(pd.mu) / nineq;
      Matrix K = Matrix::Zero(nz + me, nz + me);
      const Vector wdiag = (pd.mu.array() / pd.s.array()).matrix();
      K.topLeftCorner(nz, nz) = dense.Q + dense.G.transpose() * wdiag.asDiagonal() * dense.G;
      K.block(0, nz, nz, me) = -dense.A.transpose();
      K.block(nz, 0, me, nz) = dense.A;
      Eigen::PartialPivLU<Matrix> lu(K);

      // Predictor.
      const Vector rc_aff = (pd.s.array() * pd.mu.array()).matrix();
      const Direction aff = newton_direction(dense, pd, r, lu, rc_aff);
      const double a_aff = std::min(max_step(pd.s, aff.ds), max_step(pd.mu, aff.dmu));
      const double gap_aff =
          (pd.s + a_aff * aff.ds).dot(pd.mu + a_aff * aff.dmu) / nineq;
      const double centering = std::pow(std::max(gap_aff, 0.0) / gap, 3);

      // Corrector.
      const Vector rc = (pd.s.array() * pd.mu.array() + aff.ds.array() * aff.dmu.array() -
                         centering * gap)
                            .matrix();
      const Direction dir = newton_direction(dense, pd, r, lu, rc);
      if (!dir.dz.allFinite() || !dir.dmu.allFinite()) {
        throw NumericalError("solve_qp: non-finite Newton direction");
      }
      const double fraction = std::max(0.99, 1.0 - gap);
      const double alpha =
          std::min(1.0, fraction * std::min(max_step(pd.s, dir.ds), max_step(pd.mu, dir.dmu)));
      pd.z += alpha * dir.dz;
      pd.y += alpha * dir.dy;
      pd.s += alpha * dir.ds;
      pd.mu += alpha * dir.dmu;
    }
    const double res = residual_of(dense, pd).max();
    if (res < best_res) {
      best_res = res;
      best = pd;
    }
  }

  bool polished = false;
  if (std::optional<PrimalDual> refined = polish(dense, best)) {
    const double res = residual_of(dense, *refined).max();
    if (res < best_res || nineq == 0) {
      best_res = res;
      best = *std::move(refined);
      best.s = best.s.cwiseMax(0.0);
      best.mu = best.mu.cwiseMax(0.0);
      polished = true;
    }
  }

  QpSolution sol = to_solution(qp, best);
  sol.iterations = iter;
  sol.polished = polished;
  if (!(best_res <= target)) {
    sol.status = QpStatus::Stalled;
    throw QpStallError("solve_qp: iteration cap reached before tolerance", std::move(sol),
                       best_res);
  }
  return sol;
}

QpResiduals residuals(const QpData& qp, const QpSolution& sol) {
  const int me = qp.eq_count;
  const int mi = qp.ineq_count;
  if (sol.d.size() != qp.n() || sol.lambda.size() != qp.m() || sol.v.size() != me ||
      sol.w.size() != me || sol.t.size() != mi || sol.p.size() != me || sol.q.size() != me ||
      sol.r.size() != mi) {
    throw ContractError("residuals: dimension mismatch");
  }
  QpResiduals out;
  Vector grad = qp.g + qp.B * sol.d;
  if (qp.m() > 0) grad -= qp.J.transpose() * sol.lambda;
  out.stationarity = grad.size() > 0 ? grad.lpNorm<Eigen::Infinity>() : 0.0;

  const Vector lin = qp.c + qp.J * sol.d;
  for (int i = 0; i < me; ++i) {
    out.stationarity = std::max({out.stationarity, std::abs(qp.theta + sol.lambda[i] - sol.p[i]),
                                 std::abs(qp.theta - sol.lambda[i] - sol.q[i])});
    out.primal = std::max({out.primal, std::abs(lin[i] - sol.v[i] + sol.w[i]), -sol.v[i],
                           -sol.w[i]});
    out.complementarity =
        std::max({out.complementarity, std::abs(sol.p[i] * sol.v[i]),
                  std::abs(sol.q[i] * sol.w[i]), -sol.p[i], -sol.q[i]});
  }
  for (int j = 0; j < mi; ++j) {
    const int i = me + j;
    const double row = lin[i] + sol.t[j];
    out.stationarity =
        std::max(out.stationarity, std::abs(qp.theta - sol.lambda[i] - sol.r[j]));
    out.primal = std::max({out.primal, -row, -sol.t[j]});
    out.complementarity =
        std::max({out.complementarity, std::abs(sol.lambda[i] * row),
                  std::abs(sol.r[j] * sol.t[j]), -sol.lambda[i], -sol.r[j]});
  }
  return out;
}

}  // namespace nsqp
