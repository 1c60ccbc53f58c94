#include <gtest/gtest.h>

#include <cmath>

#include "nsqp/analysis.hpp"
#include "nsqp/driver.hpp"
#include "nsqp/errors.hpp"
#include "nsqp/library.hpp"
#include "support.hpp"

namespace nsqp {
namespace {

using test::vec;

ProblemSpec zero_objective(int n) {
  ProblemSpec s = test::unconstrained(
      n, [n](const Vector&) { return ObjectiveValue{0.0, Vector::Zero(n)}; }, -1.0, 1.0);
  s.rho = 0.0;
  s.lip_h = 0.0;
  return s;
}

PotentialParams params_for(const ProblemSpec& s, double sigma, double ell) {
  PotentialParams p;
  p.sigma = sigma;
  p.ell = ell;
  p.box = s.box;
  return p;
}

SolveResult run_with_b(const NamedProblem& p, double b) {
  SolverConfig c;
  c.b_rule = FixedB{b};
  return solve(p.spec, p.x0, c);
}

// ---------------------------------------------------------------------------
// conjugate

TEST(Conjugate, InteriorQuadratic) {
  const ProblemSpec s = zero_objective(1);
  EXPECT_NEAR(conjugate_value(s, params_for(s, 1.0, 1.0), vec({0.5})), 0.125, 1e-10);
}

TEST(Conjugate, BoundaryMaximizer) {
  const ProblemSpec s = zero_objective(1);
  const ConjugateOracle conj(s, params_for(s, 1.0, 1.0));
  EXPECT_NEAR(conj(vec({2.0})), 1.5, 1e-12);
  EXPECT_NEAR(conj.argmax(vec({2.0}))(0), 1.0, 1e-12);
}

TEST(Conjugate, Dc1dAgainstDenseGrid) {
  const NamedProblem p = build("dc1d");
  const PotentialParams params = params_for(p.spec, 3.0, 2.0);
  const ConjugateOracle conj(p.spec, params);
  for (double y : {0.0, 0.7, -2.5}) {
    double best = -INFINITY;
    const int N = 1000000;
    for (int i = 0; i <= N; ++i) {
      const double x = -2.0 + 4.0 * i / N;
      const double F = -(x * x - std::abs(x)) + 1.5 * x * x;
      best = std::max(best, y * x - F);
    }
    EXPECT_NEAR(conj(vec({y})), best, 1e-4) << "y=" << y;
    EXPECT_GE(conj(vec({y})), best - 1e-12);
  }
}

TEST(Conjugate, TwoDimensionalClosedForm) {
  const ProblemSpec s = zero_objective(2);
  const ConjugateOracle conj(s, params_for(s, 2.0, 1.0));
  // sup <y,x> - |x|^2 on the unit square: x = y / 2 inside.
  const Vector y = vec({0.6, -1.0});
  EXPECT_NEAR(conj(y), y.squaredNorm() / 4.0, 1e-9);
}

TEST(Conjugate, RejectsThreeDimensions) {
  const NamedProblem p = build("affine-eq");
  EXPECT_THROW(ConjugateOracle(p.spec, params_for(p.spec, 3.0, 1.0)), UnsupportedDimensionError);
}

TEST(Conjugate, ConvexInY) {
  const NamedProblem p = build("minq2");
  const ConjugateOracle conj(p.spec, params_for(p.spec, 3.0, 2.0));
  test::QpGenerator gen(12);
  for (int trial = 0; trial < 40; ++trial) {
    const Vector y1 = 4.0 * gen.gaussian(2, 1);
    const Vector y2 = 4.0 * gen.gaussian(2, 1);
    const double t = gen.uniform(0.0, 1.0);
    EXPECT_LE(conj(t * y1 + (1 - t) * y2), t * conj(y1) + (1 - t) * conj(y2) + 2 * kGridErrorBudget);
  }
}

TEST(Conjugate, FenchelYoung) {
  const NamedProblem p = build("recourse2");
  const ConjugateOracle conj(p.spec, params_for(p.spec, 3.0, 2.0));
  test::QpGenerator gen(13);
  for (int trial = 0; trial < 40; ++trial) {
    const Vector x = vec({gen.uniform(-2.0, 2.0), gen.uniform(-2.0, 2.0)});
    const Vector y = 3.0 * gen.gaussian(2, 1);
    EXPECT_GE(conj.F(x) + conj(y) - y.dot(x), -kGridErrorBudget);
  }
}

// ---------------------------------------------------------------------------
// potential

TEST(Potential, ConjugateIdentityGivesZero) {
  const ProblemSpec s = zero_objective(1);
  const Vector x = vec({0.3});
  EXPECT_NEAR(potential_value(s, params_for(s, 1.0, 1.0), x, x, x), 0.0, 1e-10);
}

TEST(Potential, IndicatorOutsideLinearization) {
  ProblemSpec s = zero_objective(1);
  s.eq_count = 1;
  s.constraints = [](const Vector& x) { return ConstraintValues{x, Matrix::Identity(1, 1)}; };
  const PotentialParams params = params_for(s, 1.0, 1.0);
  EXPECT_TRUE(std::isinf(potential_value(s, params, vec({0.5}), vec({0.0}), vec({0.2}))));
  EXPECT_TRUE(std::isfinite(potential_value(s, params, vec({0.0}), vec({0.0}), vec({0.2}))));
}

TEST(Potential, Dc1dTraceTripleIsFinite) {
  const NamedProblem p = build("dc1d");
  const SolveResult r = run_with_b(p, 4.0);
  ASSERT_TRUE(r.converged());
  const PotentialParams params = params_for(p.spec, 3.0, 2.0);
  const auto& t = r.trace;
  const int k = static_cast<int>(t.size()) - 2;
  const Vector z = -t[k].g + 3.0 * t[k].x;
  EXPECT_TRUE(std::isfinite(potential_value(p.spec, params, t[k + 1].x, z, t[k].x)));
}

TEST(Potential, DefaultParams) {
  const NamedProblem p = build("dc1d");
  const PotentialParams params = default_potential_params(p.spec, 4.0, 1.0);
  EXPECT_EQ(params.sigma, 3.0);
  EXPECT_EQ(params.ell, 4.0);  // min(2b - sigma, b)
  EXPECT_TRUE(potential_premise_violations(p.spec, params, 4.0).empty());
  ProblemSpec bare = p.spec;
  bare.rho.reset();
  EXPECT_THROW(default_potential_params(bare, 4.0, 1.0), CapabilityError);
}

TEST(Potential, PremiseMessages) {
  const NamedProblem p = build("dc1d");
  const auto v = potential_premise_violations(p.spec, params_for(p.spec, 3.0, 6.0), 4.0);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "2b >= sigma + l (8 < 9)");
  EXPECT_FALSE(potential_premise_violations(p.spec, params_for(p.spec, 1.5, 1.0), 4.0).empty());
  EXPECT_FALSE(potential_premise_violations(p.spec, params_for(p.spec, 5.0, 1.0), 4.0).empty());
}

TEST(Potential, NonlinearPremises) {
  const NamedProblem p = build("infeasible-lin");
  PotentialParams params = params_for(p.spec, 5.0, 6.0);
  params.c_b = 0.5;
  EXPECT_TRUE(potential_premise_violations(p.spec, params, 10.0).empty());
  params.ell = 4.0;  // l <= c_b b
  EXPECT_FALSE(potential_premise_violations(p.spec, params, 10.0).empty());
  params.ell = 6.0;
  params.c_b = 1.2;
  EXPECT_FALSE(potential_premise_violations(p.spec, params, 10.0).empty());
}

// ---------------------------------------------------------------------------
// descent

TEST(Descent, Dc1dTail) {
  const NamedProblem p = build("dc1d");
  const SolveResult r = run_with_b(p, 4.0);
  ASSERT_TRUE(r.converged());
  const DescentReport rep = potential_descent_check(r.trace, p.spec, params_for(p.spec, 3.0, 2.0), 4.0);
  EXPECT_FALSE(rep.steps.empty());
  EXPECT_GE(rep.min_margin, -kGridErrorBudget);
}

TEST(Descent, Minq2Tail) {
  const NamedProblem p = build("minq2");
  const double b = 4.0;
  const SolveResult r = run_with_b(p, b);
  ASSERT_TRUE(r.converged());
  const PotentialParams params = default_potential_params(p.spec, b, r.final_record().theta);
  const DescentReport rep = potential_descent_check(r.trace, p.spec, params, b);
  EXPECT_GE(rep.min_margin, -kGridErrorBudget);
}

TEST(Descent, StationaryTraceIsZero) {
  const NamedProblem p = build("dc1d");
  std::vector<IterationRecord> trace(6);
  for (int k = 0; k < 6; ++k) {
    trace[k].k = k;
    trace[k].x = vec({0.5});
    trace[k].g = vec({0.0});
    trace[k].d = vec({0.0});
    trace[k].lambda = Vector::Zero(2);
  }
  const DescentReport rep = potential_descent_check(trace, p.spec, params_for(p.spec, 3.0, 2.0), 4.0);
  ASSERT_EQ(rep.steps.size(), 4u);
  for (const auto& s : rep.steps) EXPECT_EQ(s.difference, 0.0);
}

TEST(Descent, PremiseError) {
  const NamedProblem p = build("dc1d");
  const SolveResult r = run_with_b(p, 4.0);
  EXPECT_THROW(potential_descent_check(r.trace, p.spec, params_for(p.spec, 3.0, 6.0), 4.0),
               PremiseError);
}

TEST(Descent, ShortTail) {
  const NamedProblem p = build("dc1d");
  const SolveResult r = run_with_b(p, 4.0);
  std::vector<IterationRecord> two(r.trace.begin(), r.trace.begin() + 2);
  EXPECT_THROW(potential_descent_check(two, p.spec, params_for(p.spec, 3.0, 2.0), 4.0),
               InsufficientDataError);
}

// ---------------------------------------------------------------------------
// subgradient bound

IterationRecord record_at(Vector x, Vector g, Vector lambda) {
  IterationRecord r;
  r.x = std::move(x);
  r.g = std::move(g);
  r.lambda = std::move(lambda);
  return r;
}

TEST(Subgradient, ZeroStep) {
  const NamedProblem p = build("dc1d");
  const IterationRecord r = record_at(vec({0.5}), vec({0.0}), Vector::Zero(2));
  const SubgradientBound sb =
      subgradient_bound_vector(p.spec, r, r, 4.0 * Matrix::Identity(1, 1), params_for(p.spec, 3.0, 2.0));
  EXPECT_EQ(sb.vector.norm(), 0.0);
  EXPECT_EQ(sb.ratio, 0.0);
}

TEST(Subgradient, AffineClosedForm) {
  const NamedProblem p = build("minq2");
  const double b = 4.0, sigma = 3.0, ell = 2.0;
  const IterationRecord a = record_at(vec({0.3, -0.1}), vec({0.0, 0.0}), vec({0.1, 0.0, 0.0, 0.0, 0.0}));
  const IterationRecord c = record_at(vec({0.5, -0.3}), vec({0.0, 0.0}), Vector::Zero(5));
  const SubgradientBound sb = subgradient_bound_vector(p.spec, a, c, b * Matrix::Identity(2, 2),
                                                       params_for(p.spec, sigma, ell));
  const double expected = std::sqrt((sigma - b) * (sigma - b) + 1.0 + ell * ell);
  EXPECT_NEAR(sb.ratio, expected, 1e-14);
  EXPECT_LE(sb.ratio, subgradient_ratio_bound(sigma, b, ell, 0.1, 0.0));
}

TEST(Subgradient, Dc1dFenchelYoung) {
  const NamedProblem p = build("dc1d");
  const SolveResult r = run_with_b(p, 4.0);
  ASSERT_TRUE(r.converged());
  const PotentialParams params = params_for(p.spec, 3.0, 2.0);
  const auto& t = r.trace;
  for (size_t k = 0; k + 1 < t.size(); ++k) {
    const SubgradientBound sb =
        subgradient_bound_vector(p.spec, t[k], t[k + 1], 4.0 * Matrix::Identity(1, 1), params);
    ASSERT_TRUE(sb.fenchel_young_residual.has_value());
    EXPECT_LE(std::abs(*sb.fenchel_young_residual), kGridErrorBudget) << "k=" << k;
  }
}

TEST(Subgradient, MissingHessians) {
  ProblemSpec s = build("minq2").spec;
  s.hessians = nullptr;
  const IterationRecord a = record_at(vec({0.3, -0.1}), vec({0.0, 0.0}), Vector::Zero(5));
  EXPECT_THROW(subgradient_bound_vector(s, a, a, Matrix::Identity(2, 2), params_for(s, 3.0, 2.0)),
               CapabilityError);
}

// ---------------------------------------------------------------------------
// rate fit

TEST(RateFit, Geometric) {
  std::vector<double> e;
  for (int k = 0; k <= 20; ++k) e.push_back(2.0 * std::pow(0.5, k));
  const RateFit f = fit_linear_rate(e);
  EXPECT_NEAR(f.q0, 0.5, 1e-12);
  EXPECT_NEAR(f.q1, 2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.points, 21);
}

TEST(RateFit, Constant) {
  const RateFit f = fit_linear_rate(std::vector<double>(10, 0.3));
  EXPECT_NEAR(f.q0, 1.0, 1e-14);
  EXPECT_EQ(f.r_squared, 1.0);
}

TEST(RateFit, Errors) {
  EXPECT_THROW(fit_linear_rate({1.0, 0.5}), InsufficientDataError);
  EXPECT_THROW(fit_linear_rate({1.0, 0.0, 0.5}), ContractError);
}

TEST(RateFit, RandomGeometricExact) {
  test::QpGenerator gen(14);
  for (int trial = 0; trial < 200; ++trial) {
    const double q0 = gen.uniform(0.05, 0.99);
    const double q1 = gen.uniform(0.1, 10.0);
    const int N = gen.uniform_int(3, 40);
    std::vector<double> e;
    for (int k = 0; k < N; ++k) e.push_back(q1 * std::pow(q0, k));
    const RateFit f = fit_linear_rate(e);
    EXPECT_NEAR(f.q0, q0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  }
}

TEST(RateFit, Dc1dRun) {
  const NamedProblem p = build("dc1d");
  const SolveResult r = run_with_b(p, p.default_b);
  std::vector<Vector> xs;
  for (const auto& rec : r.trace) xs.push_back(rec.x);
  const RateFit f = fit_linear_rate(tail_errors(xs));
  EXPECT_LT(f.q0, 1.0);
  EXPECT_GE(f.r_squared, 0.9);
}

TEST(TailErrors, DropsZeros) {
  const std::vector<Vector> xs = {vec({1.0}), vec({0.0}), vec({0.5}), vec({0.0})};
  EXPECT_EQ(tail_errors(xs), (std::vector<double>{1.0, 0.5}));
}

// ---------------------------------------------------------------------------
// MFCQ

ProblemSpec line_equality(int rows) {
  ProblemSpec s = zero_objective(2);
  s.eq_count = rows;
  s.constraints = [rows](const Vector& x) {
    ConstraintValues cv;
    cv.values = Vector::Constant(rows, x(0) + x(1) - 1.0);
    cv.jacobian = Matrix::Ones(rows, 2);
    return cv;
  };
  return s;
}

TEST(Mfcq, SingleEquality) {
  const MfcqResult r = check_mfcq(line_equality(1), vec({0.5, 0.5}), 1e-8);
  EXPECT_TRUE(r.holds);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_NEAR((*r.witness)(0) + (*r.witness)(1), 0.0, 1e-12);
  EXPECT_NEAR(r.witness->norm(), 1.0, 1e-12);
}

TEST(Mfcq, DependentGradients) {
  const MfcqResult r = check_mfcq(line_equality(2), vec({0.5, 0.5}), 1e-8);
  EXPECT_FALSE(r.holds);
}

TEST(Mfcq, Minq2Final) {
  const NamedProblem p = build("minq2");
  const SolveResult r = run_with_b(p, p.default_b);
  const MfcqResult m = check_mfcq(p.spec, r.final_record().x, 1e-6);
  EXPECT_TRUE(m.holds) << m.reason;
}

TEST(Mfcq, ActiveInequalitiesOpposed) {
  // x >= 0 and -x >= 0 active at 0: no w with w >= 1 and -w >= 1.
  ProblemSpec s = zero_objective(1);
  s.ineq_count = 2;
  s.constraints = [](const Vector& x) {
    ConstraintValues cv;
    cv.values = vec({x(0), -x(0)});
    cv.jacobian = Matrix(2, 1);
    cv.jacobian << 1.0, -1.0;
    return cv;
  };
  EXPECT_FALSE(check_mfcq(s, vec({0.0}), 1e-8).holds);
  EXPECT_THROW(check_mfcq(s, vec({0.5}), 1e-8), ContractError);
}

TEST(Mfcq, ActiveBoxRow) {
  const NamedProblem p = build("dc1d");
  const MfcqResult r = check_mfcq(p.spec, vec({2.0}), 1e-8);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR((*r.witness)(0), -1.0, 1e-6);
}

// ---------------------------------------------------------------------------
// monitors

TEST(Monitors, CatalogRunsPass) {
  for (const auto& name : catalog_names()) {
    const NamedProblem p = build(name);
    const SolveResult r = run_with_b(p, p.default_b);
    ASSERT_TRUE(r.converged()) << name;
    const auto& t = r.trace;
    EXPECT_TRUE(monitor_multiplier_bounds(t).passed) << name;
    EXPECT_TRUE(monitor_qp_residuals(t).passed) << name;
    EXPECT_TRUE(monitor_line_search(t).passed) << name;
    EXPECT_TRUE(monitor_merit_decrease(t, 0.1).passed) << name;
    EXPECT_TRUE(monitor_theta_tail(t).passed) << name;
    EXPECT_TRUE(monitor_slack_tail(t).passed) << name;
    EXPECT_TRUE(monitor_step_vanishing(t, 1e-8).passed) << name;
    EXPECT_TRUE(monitor_kkt(t).passed) << name;
    EXPECT_TRUE(monitor_mfcq(t, p.spec).passed) << name;
    EXPECT_TRUE(monitor_step_lower_bound(t, p.spec, 0.5, p.default_b).passed) << name;
    if (p.has_tag("affine")) {
      EXPECT_TRUE(monitor_full_step(t).passed) << name;
    }
  }
}

TEST(Monitors, DetectBrokenTrace) {
  const NamedProblem p = build("dc1d");
  SolveResult r = run_with_b(p, p.default_b);
  auto t = r.trace;
  t[1].monitor_flags.multiplier_bounds_ok = false;
  EXPECT_FALSE(monitor_multiplier_bounds(t).passed);
  t = r.trace;
  t[t.size() / 2 + 1].theta_qp += 1.0;
  t[t.size() / 2 + 1].theta += 1.0;
  EXPECT_FALSE(monitor_theta_tail(t).passed);
  t = r.trace;
  t.back().max_slack = 1e-3;
  EXPECT_FALSE(monitor_slack_tail(t).passed);
  t = r.trace;
  t.back().step_norm = 1e-3;
  EXPECT_FALSE(monitor_step_vanishing(t, 1e-8).passed);
  t = r.trace;
  t.back().kkt.stationarity = 1e-3;
  EXPECT_FALSE(monitor_kkt(t).passed);
  EXPECT_THROW(monitor_kkt({}), InsufficientDataError);
}

TEST(Monitors, PotentialAndSubgradient) {
  for (const std::string name : {"dc1d", "minq2", "recourse2"}) {
    const NamedProblem p = build(name);
    const double b = std::max(p.default_b, p.spec.rho.value() + 1.0);
    const SolveResult r = run_with_b(p, b);
    ASSERT_TRUE(r.converged());
    const PotentialParams params = default_potential_params(p.spec, b, r.final_record().theta);
    EXPECT_TRUE(monitor_potential_descent(r.trace, p.spec, params, b).passed) << name;
    EXPECT_TRUE(monitor_subgradient_bound(r.trace, p.spec, params).passed) << name;
  }
}

}  // namespace
}  // namespace nsqp
