#include "nsqp/library.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nsqp/errors.hpp"

namespace nsqp {

ObjectiveOracle min_of_pieces(std::vector<SmoothPiece> pieces) {
  if (pieces.empty()) throw ContractError("min_of_pieces: no pieces");
  return [pieces = std::move(pieces)](const Vector& x) {
    std::size_t best = 0;
    double value = pieces[0].value(x);
    for (std::size_t j = 1; j < pieces.size(); ++j) {
      const double vj = pieces[j].value(x);
      if (vj < value) {
        value = vj;
        best = j;
      }
    }
    return ObjectiveValue{value, pieces[best].gradient(x)};
  };
}

SmoothPiece quadratic_piece(double kappa, Vector center, double offset) {
  SmoothPiece p;
  p.value = [kappa, center, offset](const Vector& x) {
    return 0.5 * kappa * (x - center).squaredNorm() + offset;
  };
  p.gradient = [kappa, center](const Vector& x) -> Vector { return kappa * (x - center); };
  return p;
}

ConstraintValues box_rows(const Box& box, const Vector& x) {
  const int n = box.dim();
  ConstraintValues cv;
  cv.values.resize(2 * n);
  cv.jacobian = Matrix::Zero(2 * n, n);
  for (int i = 0; i < n; ++i) {
    cv.values(2 * i) = x(i) - box.lower(i);
    cv.values(2 * i + 1) = box.upper(i) - x(i);
    cv.jacobian(2 * i, i) = 1.0;
    cv.jacobian(2 * i + 1, i) = -1.0;
  }
  return cv;
}

double default_b_for(const ProblemSpec& spec) {
  return 1.1 * std::max(1.0, spec.rho.value_or(1.0));
}

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Prepends affine equality rows A x - b to the box rows.
ConstraintOracle affine_eq_with_box(Matrix A, Vector b, Box box) {
  return [A = std::move(A), b = std::move(b), box = std::move(box)](const Vector& x) {
    const ConstraintValues rows = box_rows(box, x);
    const int me = static_cast<int>(A.rows());
    ConstraintValues cv;
    cv.values.resize(me + rows.values.size());
    cv.jacobian.resize(me + rows.jacobian.rows(), x.size());
    cv.values.head(me) = A * x - b;
    cv.values.tail(rows.values.size()) = rows.values;
    cv.jacobian.topRows(me) = A;
    cv.jacobian.bottomRows(rows.jacobian.rows()) = rows.jacobian;
    return cv;
  };
}

HessianOracle zero_hessians(int m, int n) {
  return [m, n](const Vector&) { return std::vector<Matrix>(m, Matrix::Zero(n, n)); };
}

NamedProblem make_dc1d() {
  NamedProblem p;
  p.name = "dc1d";
  auto& s = p.spec;
  s.n = 1;
  s.eq_count = 0;
  s.ineq_count = 2;
  s.box = Box::cube(1, -2.0, 2.0);
  // x^2 - |x| = min(x^2 - x, x^2 + x); ties at 0 go to the first piece.
  s.objective = min_of_pieces({
      {[](const Vector& x) { return x(0) * x(0) - x(0); },
       [](const Vector& x) -> Vector { return vec({2.0 * x(0) - 1.0}); }},
      {[](const Vector& x) { return x(0) * x(0) + x(0); },
       [](const Vector& x) -> Vector { return vec({2.0 * x(0) + 1.0}); }},
  });
  s.constraints = [box = s.box](const Vector& x) { return box_rows(box, x); };
  s.hessians = zero_hessians(2, 1);
  s.rho = 2.0;
  s.lip_h = 0.0;
  s.affine_constraints = true;
  s.reference = ReferenceSolution{{vec({-0.5}), vec({0.5})}, -0.25};
  p.x0 = vec({2.0});
  p.expected = {*s.reference, 1e-6, "1D grid at resolution 1e-7; symmetric pair"};
  p.tags = {"affine"};
  p.default_b = default_b_for(s);
  return p;
}

NamedProblem make_minq2() {
  NamedProblem p;
  p.name = "minq2";
  auto& s = p.spec;
  s.n = 2;
  s.eq_count = 1;
  s.ineq_count = 4;
  s.box = Box::cube(2, -3.0, 3.0);
  s.objective = min_of_pieces({
      quadratic_piece(2.0, vec({1.0, 0.0}), 0.0),
      quadratic_piece(2.0, vec({-1.0, 0.0}), 0.5),
  });
  Matrix A(1, 2);
  A << 1.0, 1.0;
  s.constraints = affine_eq_with_box(A, vec({0.2}), s.box);
  s.hessians = zero_hessians(5, 2);
  s.rho = 2.0;
  s.lip_h = 0.0;
  s.affine_constraints = true;
  s.reference = ReferenceSolution{{vec({0.6, -0.4})}, 0.32};
  p.x0 = vec({2.0, -1.8});
  p.expected = {*s.reference, 1e-6, "grid over the line x1 + x2 = 0.2 at 1e-5"};
  p.tags = {"affine"};
  p.default_b = default_b_for(s);
  return p;
}

NamedProblem make_affine_eq() {
  NamedProblem p;
  p.name = "affine-eq";
  auto& s = p.spec;
  s.n = 3;
  s.eq_count = 2;
  s.ineq_count = 0;
  s.box = Box::cube(3, -3.0, 3.0);
  const Vector a = vec({1.0, -0.5, 0.25});
  s.objective = [a](const Vector& x) {
    ObjectiveValue out;
    out.value = (x - a).squaredNorm() - x.lpNorm<1>();
    out.subgradient = 2.0 * (x - a);
    for (int i = 0; i < 3; ++i) out.subgradient(i) -= x(i) >= 0.0 ? 1.0 : -1.0;
    return out;
  };
  Matrix A(2, 3);
  A << 1.0, 1.0, 1.0, 1.0, 0.0, -1.0;
  const Vector b = vec({1.0, 0.5});
  s.constraints = [A, b](const Vector& x) { return ConstraintValues{A * x - b, A}; };
  s.hessians = zero_hessians(2, 3);
  s.rho = 2.0;
  s.lip_h = 0.0;
  s.affine_constraints = true;
  // x = (0.5 + t, 0.5 - 2t, t); minimum at t = 19/24.
  s.reference = ReferenceSolution{{vec({31.0 / 24.0, -26.0 / 24.0, 19.0 / 24.0})},
                                  -1410.0 / 576.0};
  p.x0 = vec({0.0, 0.0, 0.0});
  p.expected = {*s.reference, 1e-6, "closed form along the feasible line"};
  p.tags = {"affine"};
  p.default_b = default_b_for(s);
  return p;
}

NamedProblem make_infeasible_lin() {
  NamedProblem p;
  p.name = "infeasible-lin";
  auto& s = p.spec;
  s.n = 2;
  s.eq_count = 1;
  s.ineq_count = 0;
  s.box = Box::cube(2, -2.0, 2.0);
  // (x1 - 0.5)^2 + 2 (x2 - 0.5)^2; the anisotropy keeps iterates off the ray
  // through the origin so the feasible phase is a genuine tail.
  const Vector a = vec({0.5, 0.5});
  const Vector w = vec({1.0, 2.0});
  s.objective = [a, w](const Vector& x) {
    const Vector r = x - a;
    return ObjectiveValue{r.dot(w.asDiagonal() * r), 2.0 * (w.asDiagonal() * r)};
  };
  s.constraints = [](const Vector& x) {
    ConstraintValues cv;
    cv.values = vec({x.squaredNorm() - 1.0});
    cv.jacobian = 2.0 * x.transpose();
    return cv;
  };
  s.hessians = [](const Vector&) { return std::vector<Matrix>{2.0 * Matrix::Identity(2, 2)}; };
  s.rho = 4.0;
  s.lip_h = 2.0;
  s.affine_constraints = false;
  // x_i = w_i a_i / (w_i - lambda) with |x| = 1; lambda = 0.36744303901972621.
  s.reference = ReferenceSolution{{vec({0.79044264918869881, 0.61253605472947600})},
                                  0.10968565969590080};
  p.x0 = vec({0.0, 0.0});
  p.expected = {*s.reference, 1e-6, "multiplier root of the Lagrange condition"};
  p.tags = {"nonlinear-eq", "elastic-start"};
  p.default_b = default_b_for(s);
  return p;
}

NamedProblem make_recourse2() {
  NamedProblem p;
  p.name = "recourse2";
  auto& s = p.spec;
  s.n = 2;
  s.eq_count = 1;
  s.ineq_count = 4;
  s.box = Box::cube(2, -2.0, 2.0);
  const Vector c = vec({0.1, -0.2});
  const std::vector<ObjectiveOracle> scenarios = {
      min_of_pieces({quadratic_piece(1.0, vec({1.0, 0.0}), 0.0),
                     quadratic_piece(1.0, vec({-1.0, 1.0}), 0.2)}),
      min_of_pieces({quadratic_piece(0.5, vec({0.5, 0.5}), 0.0),
                     quadratic_piece(0.5, vec({2.0, -1.0}), -0.1)}),
      min_of_pieces({quadratic_piece(0.5, vec({0.0, 1.0}), 0.0),
                     quadratic_piece(0.5, vec({1.0, -1.0}), 0.1),
                     quadratic_piece(0.5, vec({-1.0, 0.0}), 0.3)}),
  };
  s.objective = [c, scenarios](const Vector& x) {
    ObjectiveValue out{c.dot(x), c};
    for (const auto& sc : scenarios) {
      const ObjectiveValue v = sc(x);
      out.value += v.value;
      out.subgradient += v.subgradient;
    }
    return out;
  };
  Matrix A(1, 2);
  A << 1.0, 1.0;
  s.constraints = affine_eq_with_box(A, vec({1.0}), s.box);
  s.hessians = zero_hessians(5, 2);
  s.rho = 2.0;  // sum of the scenario curvatures
  s.lip_h = 0.0;
  s.affine_constraints = true;
  s.reference = ReferenceSolution{{vec({0.55, 0.45})}, 0.32};
  p.x0 = vec({0.0, 0.0});
  p.expected = {*s.reference, 1e-6, "enumeration of piece combinations, confirmed by grid at 1e-4"};
  p.tags = {"two-stage", "affine"};
  p.default_b = default_b_for(s);
  return p;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"dc1d", "minq2", "affine-eq", "infeasible-lin",
                                                 "recourse2"};
  return names;
}

NamedProblem build(const std::string& name) {
  if (name == "dc1d") return make_dc1d();
  if (name == "minq2") return make_minq2();
  if (name == "affine-eq") return make_affine_eq();
  if (name == "infeasible-lin") return make_infeasible_lin();
  if (name == "recourse2") return make_recourse2();
  throw CatalogError("unknown problem '" + name + "'");
}

// ---------------------------------------------------------------------------
// Brute-force reference

namespace {

// Grid parameterization x = origin + N s with s in [lo, hi].
struct GridFrame {
  Vector origin;
  Matrix N;
  Vector lo;
  Vector hi;
  bool exact_equalities = false;
};

struct Candidate {
  Vector x;
  double f = std::numeric_limits<double>::infinity();
};

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

// Basins whose refined values agree to this margin resolve to the
// lexicographically smaller minimizer.
constexpr double kTieTolerance = 1e-12;

bool better(const Candidate& a, const Candidate& b, double tie = 0.0) {
  if (a.f < b.f - tie) return true;
  if (a.f > b.f + tie) return false;
  return lex_less(a.x, b.x);
}

// Gauss-Newton projection onto the equality rows.
Vector project_equalities(const ProblemSpec& spec, Vector x) {
  for (int it = 0; it < 100; ++it) {
    const ConstraintValues cv = spec.constraints(x);
    const Vector c = cv.values.head(spec.eq_count);
    if (c.lpNorm<Eigen::Infinity>() <= 1e-15) break;
    const Matrix J = cv.jacobian.topRows(spec.eq_count);
    const Vector step = J.transpose() * (J * J.transpose()).ldlt().solve(c);
    if (!step.allFinite()) break;
    x -= step;
  }
  return x;
}

class GridSearch {
 public:
  GridSearch(const ProblemSpec& spec, GridFrame frame) : spec_(spec), frame_(std::move(frame)) {}

  long evaluations() const { return evaluations_; }

  // Objective at x if feasible at grid spacing h, else +inf. Under relaxed
  // equalities x is replaced by its projection onto the equality manifold
  // and scored there.
  double feasible_value(Vector& x, double h) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!spec_.box.contains(x, 0.0)) return inf;
    if (spec_.m() > 0) {
      ConstraintValues cv = spec_.constraints(x);
      const double eq_tol = frame_.exact_equalities ? 1e-9 : 10.0 * h;
      for (int i = 0; i < spec_.eq_count; ++i) {
        if (std::abs(cv.values(i)) > eq_tol) return inf;
      }
      if (!frame_.exact_equalities && spec_.eq_count > 0) {
        x = project_equalities(spec_, x);
        if (!spec_.box.contains(x, 0.0)) return inf;
        cv = spec_.constraints(x);
        if (cv.values.head(spec_.eq_count).lpNorm<Eigen::Infinity>() > 1e-12) return inf;
      }
      for (int i = spec_.eq_count; i < spec_.m(); ++i) {
        if (cv.values(i) < -1e-12) return inf;
      }
    }
    ++evaluations_;
    return spec_.objective(x).value;
  }

  // Evaluates the tensor grid over [lo, hi] with `points` nodes per axis and
  // returns the values in row-major order with their points.
  std::vector<Candidate> sweep(const Vector& lo, const Vector& hi, int points, double h) {
    const int k = static_cast<int>(lo.size());
    long total = 1;
    for (int j = 0; j < k; ++j) total *= points;
    std::vector<Candidate> out(static_cast<std::size_t>(total));
    std::vector<int> idx(k, 0);
    for (long flat = 0; flat < total; ++flat) {
      long r = flat;
      Vector s(k);
      for (int j = k - 1; j >= 0; --j) {
        idx[j] = static_cast<int>(r % points);
        r /= points;
        const double t = points > 1 ? static_cast<double>(idx[j]) / (points - 1) : 0.5;
        s(j) = lo(j) + t * (hi(j) - lo(j));
      }
      Candidate& c = out[static_cast<std::size_t>(flat)];
      c.x = frame_.origin + frame_.N * s;
      c.f = feasible_value(c.x, h);
    }
    return out;
  }

  const GridFrame& frame() const { return frame_; }

 private:
  const ProblemSpec& spec_;
  GridFrame frame_;
  long evaluations_ = 0;
};

GridFrame make_frame(const ProblemSpec& spec) {
  GridFrame frame;
  const int n = spec.n;
  if (spec.eq_count > 0 && spec.affine_constraints) {
    const Vector center = 0.5 * (spec.box.lower + spec.box.upper);
    const ConstraintValues cv = spec.constraints(center);
    const Matrix J = cv.jacobian.topRows(spec.eq_count);
    const Vector c = cv.values.head(spec.eq_count);
    Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-12 * sv(0)) ++rank;
    }
    frame.origin = center - svd.solve(c);
    frame.N = svd.matrixV().rightCols(n - rank);
    frame.exact_equalities = true;
    const double radius =
        0.5 * (spec.box.upper - spec.box.lower).norm() + (frame.origin - center).norm();
    frame.lo = Vector::Constant(n - rank, -radius);
    frame.hi = Vector::Constant(n - rank, radius);
  } else {
    frame.origin = Vector::Zero(n);
    frame.N = Matrix::Identity(n, n);
    frame.lo = spec.box.lower;
    frame.hi = spec.box.upper;
  }
  if (frame.N.cols() > 2) {
    throw UnsupportedDimensionError("brute_force_reference: grid dimension exceeds 2");
  }
  return frame;
}

// Indices of grid points no worse than every feasible neighbor.
std::vector<std::size_t> local_minima(const std::vector<Candidate>& grid, int points, int k) {
  std::vector<std::size_t> out;
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    if (!std::isfinite(grid[flat].f)) continue;
    bool is_min = true;
    if (k == 1) {
      for (int off : {-1, 1}) {
        const long j = static_cast<long>(flat) + off;
        if (j >= 0 && j < points && grid[j].f < grid[flat].f) is_min = false;
      }
    } else {
      const long r = static_cast<long>(flat) / points;
      const long c = static_cast<long>(flat) % points;
      for (long dr = -1; dr <= 1 && is_min; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          const long rr = r + dr;
          const long cc = c + dc;
          if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= points || cc >= points) continue;
          if (grid[rr * points + cc].f < grid[flat].f) {
            is_min = false;
            break;
          }
        }
      }
    }
    if (is_min) out.push_back(flat);
  }
  return out;
}

}  // namespace

BruteForceResult brute_force_reference(const ProblemSpec& spec, double resolution) {
  if (!(resolution > 0.0)) throw ContractError("brute_force_reference: resolution must be positive");
  if (spec.box.dim() != spec.n) throw ContractError("brute_force_reference: box dimension mismatch");
  GridSearch search(spec, make_frame(spec));
  const GridFrame& frame = search.frame();
  const int k = static_cast<int>(frame.N.cols());

  if (k == 0) {
    Candidate c{frame.origin, 0.0};
    c.f = search.feasible_value(c.x, resolution);
    if (!std::isfinite(c.f)) throw ResolutionError("brute_force_reference: no feasible grid point");
    return {c.x, c.f, search.evaluations()};
  }

  // Coarse level.
  const int coarse_points = k == 1 ? 4001 : 401;
  double h = (frame.hi - frame.lo).maxCoeff() / (coarse_points - 1);
  if (h < resolution) h = resolution;
  const int points0 =
      std::max(2, static_cast<int>(std::ceil((frame.hi - frame.lo).maxCoeff() / h)) + 1);
  std::vector<Candidate> grid = search.sweep(frame.lo, frame.hi, points0, h);
  std::vector<std::size_t> minima = local_minima(grid, points0, k);
  if (minima.empty()) throw ResolutionError("brute_force_reference: no feasible grid point");

  // Keep the best few basins.
  std::sort(minima.begin(), minima.end(),
            [&](std::size_t a, std::size_t b) { return better(grid[a], grid[b]); });
  if (minima.size() > 8) minima.resize(8);

  Candidate best;
  for (std::size_t idx : minima) {
    Vector s = frame.N.transpose() * (grid[idx].x - frame.origin);
    Candidate cur = grid[idx];
    double step = h;
    while (step > resolution) {
      const int zoom_points = 41;
      const Vector lo = s.array() - 2.0 * step;
      const Vector hi = s.array() + 2.0 * step;
      const double next = 4.0 * step / (zoom_points - 1);
      std::vector<Candidate> local = search.sweep(lo, hi, zoom_points, next);
      Candidate level_best;
      for (const Candidate& c : local) {
        if (std::isfinite(c.f) && better(c, level_best)) level_best = c;
      }
      if (!std::isfinite(level_best.f)) break;
      cur = level_best;
      s = frame.N.transpose() * (cur.x - frame.origin);
      step = next;
    }
    if (better(cur, best, kTieTolerance)) best = cur;
  }
  if (!std::isfinite(best.f)) throw ResolutionError("brute_force_reference: no feasible grid point");
  return {best.x, best.f, search.evaluations()};
}

}  // namespace nsqp
