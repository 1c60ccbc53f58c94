#pragma once

// Named desk-scale test problems and a grid-search reference oracle.
//
// Catalog:
//   dc1d            x^2 - |x| on [-2, 2] (box as inequality rows)
//   minq2           min of two convex quadratics, one affine equality, box rows
//   affine-eq       |x - a|^2 - |x|_1 in R^3 with two affine equalities
//   infeasible-lin  weighted distance to a point over the unit circle, from the origin
//                   where the linearized equality is inconsistent
//   recourse2       c^T x + sum over 3 scenarios of a finite min of convex
//                   quadratics, affine coupling equality, box rows

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "nsqp/problem.hpp"

namespace nsqp {

/// One smooth piece p(x) of a pointwise minimum.
struct SmoothPiece {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// f(x) = min_j p_j(x). The returned subgradient is the gradient of the
/// active piece with the smallest index.
ObjectiveOracle min_of_pieces(std::vector<SmoothPiece> pieces);

/// p(x) = 1/2 kappa |x - center|^2 + offset.
SmoothPiece quadratic_piece(double kappa, Vector center, double offset = 0.0);

/// Inequality rows x_i - lower_i >= 0 and upper_i - x_i >= 0, two per coordinate.
ConstraintValues box_rows(const Box& box, const Vector& x);

struct ExpectedSolution {
  ReferenceSolution solution;
  double tolerance = 1e-6;
  std::string provenance;
};

struct NamedProblem {
  std::string name;
  ProblemSpec spec;
  Vector x0;
  ExpectedSolution expected;
  std::set<std::string> tags;
  double default_b = 1.0;

  bool has_tag(const std::string& tag) const { return tags.count(tag) > 0; }
};

const std::vector<std::string>& catalog_names();

/// Throws CatalogError for unknown names.
NamedProblem build(const std::string& name);

/// 1.1 * max(1, rho): keeps b > rho for problems with declared rho.
double default_b_for(const ProblemSpec& spec);

struct BruteForceResult {
  Vector x;
  double f = 0.0;
  long evaluations = 0;
};

/// Multi-level grid minimization of f over the feasible set, independent of
/// the SQP code path. Affine equalities are handled by gridding their
/// solution manifold; otherwise n <= 2 is required, equalities are relaxed to
/// |c| <= 10 h at grid spacing h, and candidates are projected back onto
/// the equality manifold. Ties resolve to the lexicographically smallest
/// minimizer. Throws ResolutionError when no grid point is feasible.
BruteForceResult brute_force_reference(const ProblemSpec& spec, double resolution);

}  // namespace nsqp
