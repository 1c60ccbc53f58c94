#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "nsqp/problem.hpp"
#include "nsqp/qp_subproblem.hpp"

namespace nsqp::test {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Matrix mat1(double a) { return Matrix::Constant(1, 1, a); }

/// Unconstrained problem on a cube.
inline ProblemSpec unconstrained(int n, ObjectiveOracle f, double lo, double hi) {
  ProblemSpec s;
  s.n = n;
  s.objective = std::move(f);
  s.box = Box::cube(n, lo, hi);
  return s;
}

/// Seeded generator of elastic QP instances.
class QpGenerator {
 public:
  explicit QpGenerator(std::uint64_t seed) : rng_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return normal_(rng_); }

  Matrix gaussian(int rows, int cols) {
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) M(i, j) = normal();
    return M;
  }

  /// B = M^T M / n + shift I with shift in [0.1, 2].
  Matrix spd(int n) {
    const Matrix M = gaussian(n, n);
    Matrix B = M.transpose() * M / n + uniform(0.1, 2.0) * Matrix::Identity(n, n);
    return 0.5 * (B + B.transpose());
  }

  QpData random_qp(int n, int me, int mi, double theta) {
    QpData qp;
    qp.B = spd(n);
    qp.g = gaussian(n, 1);
    qp.c = gaussian(me + mi, 1);
    qp.J = gaussian(me + mi, n);
    qp.theta = theta;
    qp.eq_count = me;
    qp.ineq_count = mi;
    qp.b_min = Eigen::SelfAdjointEigenSolver<Matrix>(qp.B).eigenvalues().minCoeff();
    return qp;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nsqp::test
