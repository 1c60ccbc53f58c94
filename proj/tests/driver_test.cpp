#include <gtest/gtest.h>

#include <cmath>

#include "nsqp/driver.hpp"
#include "nsqp/errors.hpp"
#include "nsqp/library.hpp"
#include "support.hpp"

namespace nsqp {
namespace {

using test::vec;

SolverConfig defaults_for(const NamedProblem& p) {
  SolverConfig c;
  c.b_rule = FixedB{p.default_b};
  return c;
}

SolveResult run(const std::string& name) {
  const NamedProblem p = build(name);
  return solve(p.spec, p.x0, defaults_for(p));
}

TEST(UpdateB, Fixed) {
  EXPECT_EQ(update_B(FixedB{2.0}, 0, 3), 2.0 * Matrix::Identity(3, 3));
  EXPECT_EQ(update_B(FixedB{2.0}, 1000, 3), 2.0 * Matrix::Identity(3, 3));
  EXPECT_EQ(rule_lower_bound(FixedB{2.0}), 2.0);
}

TEST(UpdateB, TwoPhaseSwitch) {
  const TwoPhaseB rule{1.0, 1e6, 100};
  EXPECT_EQ(update_B(rule, 99, 2), Matrix::Identity(2, 2));
  EXPECT_EQ(update_B(rule, 100, 2), 1e6 * Matrix::Identity(2, 2));
  EXPECT_EQ(rule_lower_bound(rule), 1.0);
}

TEST(UpdateB, CatalogDefaultsExceedRho) {
  for (const auto& name : catalog_names()) {
    const NamedProblem p = build(name);
    ASSERT_TRUE(p.spec.rho.has_value()) << name;
    EXPECT_GT(p.default_b, *p.spec.rho) << name;
  }
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  auto expect_bad = [](auto mutate) {
    SolverConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.validate(), ConfigError);
  };
  expect_bad([](SolverConfig& s) { s.eta = 1.0; });
  expect_bad([](SolverConfig& s) { s.eta = 0.0; });
  expect_bad([](SolverConfig& s) { s.tau_alpha = 1.5; });
  expect_bad([](SolverConfig& s) { s.gamma = 0.0; });
  expect_bad([](SolverConfig& s) { s.theta0 = -1.0; });
  expect_bad([](SolverConfig& s) { s.eps = 0.0; });
  expect_bad([](SolverConfig& s) { s.eps_c = -1.0; });
  expect_bad([](SolverConfig& s) { s.max_iter = 0; });
  expect_bad([](SolverConfig& s) { s.b_rule = FixedB{0.0}; });
  expect_bad([](SolverConfig& s) { s.b_rule = TwoPhaseB{1.0, -1.0, 10}; });
  expect_bad([](SolverConfig& s) { s.qp.tolerance = 0.0; });
}

TEST(Solve, RejectsStartOutsideBox) {
  const NamedProblem p = build("dc1d");
  EXPECT_THROW(solve(p.spec, vec({3.0}), defaults_for(p)), DomainError);
  EXPECT_THROW(solve(p.spec, vec({0.0, 0.0}), defaults_for(p)), ContractError);
}

TEST(Solve, Dc1dReachesHalf) {
  const SolveResult r = run("dc1d");
  ASSERT_TRUE(r.converged()) << r.message;
  EXPECT_LE(std::abs(r.final_record().x(0) - 0.5), 1e-6);
  EXPECT_NEAR(r.final_record().f, -0.25, 1e-10);
}

TEST(Solve, Minq2ReachesGridOptimum) {
  const NamedProblem p = build("minq2");
  const SolveResult r = solve(p.spec, p.x0, defaults_for(p));
  ASSERT_TRUE(r.converged()) << r.message;
  const BruteForceResult bf = brute_force_reference(p.spec, 1e-7);
  EXPECT_LE((r.final_record().x - bf.x).norm(), 1e-5);
  EXPECT_NEAR(r.final_record().f, bf.f, 1e-6);
}

TEST(Solve, InfeasibleLinearizationUsesSlacksFirst) {
  const SolveResult r = run("infeasible-lin");
  ASSERT_TRUE(r.converged()) << r.message;
  EXPECT_FALSE(r.trace.front().classification.inconsistent.empty());
  EXPECT_GT(r.trace.front().max_slack, 0.0);
  EXPECT_LE(r.final_record().v, 1e-8);
  EXPECT_LE(r.final_record().kkt.max(), 1e-6);
}

TEST(Solve, TwoPhaseRuleConverges) {
  const NamedProblem p = build("dc1d");
  SolverConfig c;
  c.b_rule = TwoPhaseB{p.default_b, 1e6, 3};
  const SolveResult r = solve(p.spec, p.x0, c);
  ASSERT_TRUE(r.converged()) << r.message;
  ASSERT_GT(r.trace.size(), 3u);
  EXPECT_EQ(r.trace[2].b_min, p.default_b);
  EXPECT_EQ(r.trace[3].b_min, 1e6);
  // |d| <= eps with B = 1e6 I only forces |g| <= 1e-2, so |x - 0.5| <= 5e-3.
  EXPECT_LE(std::abs(r.final_record().x(0) - 0.5), 5e-3 + 1e-12);
}

TEST(Solve, IterationCap) {
  const NamedProblem p = build("infeasible-lin");
  SolverConfig c = defaults_for(p);
  c.max_iter = 3;
  const SolveResult r = solve(p.spec, p.x0, c);
  EXPECT_EQ(r.status, SolveStatus::MaxIterations);
  EXPECT_EQ(r.trace.size(), 3u);
}

TEST(Solve, WrongSubgradientEndsWithLineSearchFailure) {
  // Reports g = -1 for f(x) = x: every QP step is an ascent direction.
  ProblemSpec s = test::unconstrained(
      1, [](const Vector& x) { return ObjectiveValue{x(0), vec({-1.0})}; }, -10.0, 10.0);
  SolverConfig c;
  c.alpha_min = 1e-6;
  const SolveResult r = solve(s, vec({0.0}), c);
  EXPECT_EQ(r.status, SolveStatus::LineSearchFailure);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Solve, OracleFailureKeepsTrace) {
  int calls = 0;
  ProblemSpec s = test::unconstrained(
      1,
      [&calls](const Vector& x) {
        if (++calls > 3) return ObjectiveValue{std::nan(""), vec({0.0})};
        return ObjectiveValue{x(0) * x(0), 2.0 * x};
      },
      -10.0, 10.0);
  const SolveResult r = solve(s, vec({1.0}), SolverConfig{});
  EXPECT_EQ(r.status, SolveStatus::OracleError);
  EXPECT_FALSE(r.trace.empty());
  EXPECT_FALSE(r.message.empty());
}

TEST(Solve, Deterministic) {
  const SolveResult a = run("recourse2");
  const SolveResult b = run("recourse2");
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].x, b.trace[i].x);
    EXPECT_EQ(a.trace[i].theta, b.trace[i].theta);
  }
}

TEST(Status, Names) {
  EXPECT_EQ(to_string(SolveStatus::Converged), "converged");
  EXPECT_EQ(to_string(SolveStatus::LineSearchFailure), "line-search-failure");
}

// Invariants on every catalog run.
class CatalogRun : public ::testing::TestWithParam<std::string> {};

TEST_P(CatalogRun, TraceInvariants) {
  const NamedProblem p = build(GetParam());
  const SolverConfig config = defaults_for(p);
  const SolveResult r = solve(p.spec, p.x0, config);
  ASSERT_TRUE(r.converged()) << r.message;
  const auto& trace = r.trace;

  // Stopping honesty.
  EXPECT_LE(r.final_record().step_norm, config.eps);
  EXPECT_LE(r.final_record().v, config.eps_c);
  EXPECT_LE(r.final_record().kkt.max(), 1e-6);

  for (size_t i = 0; i < trace.size(); ++i) {
    const IterationRecord& rec = trace[i];
    EXPECT_EQ(rec.k, static_cast<int>(i));
    EXPECT_GE(rec.step_norm, 0.0);
    EXPECT_GE(rec.theta, rec.theta_qp);
    if (rec.lambda.size() > 0 && i + 1 < trace.size()) {
      EXPECT_GE(rec.theta, rec.lambda_inf + config.gamma);
    }
    EXPECT_TRUE(rec.monitor_flags.multiplier_bounds_ok) << "k=" << i;
    EXPECT_TRUE(rec.monitor_flags.qp_residual_ok) << "k=" << i;
    EXPECT_TRUE(rec.monitor_flags.line_search_ok) << "k=" << i;
    if (i + 1 < trace.size()) {
      const IterationRecord& next = trace[i + 1];
      EXPECT_GE(next.theta_qp, rec.theta_qp);
      EXPECT_EQ(next.theta_qp, rec.theta);
      EXPECT_LE((next.x - (rec.x + rec.alpha * rec.d)).norm(), 1e-15 * (1.0 + rec.x.norm()));
      // Merit telescoping where theta stays put.
      if (rec.theta == rec.theta_qp) {
        EXPECT_GE(rec.merit - next.merit,
                  config.eta * rec.alpha * rec.model_decrease - 1e-12);
      }
    }
  }

  // Step vanishing at termination.
  EXPECT_LE(trace.back().step_norm, config.eps);

  // Eventually constant theta and vanishing slacks.
  const size_t half = trace.size() / 2;
  for (size_t i = half; i < trace.size(); ++i) EXPECT_EQ(trace[i].theta_qp, trace.back().theta_qp);
  const size_t window = std::min<size_t>(20, trace.size());
  for (size_t i = trace.size() - window; i < trace.size(); ++i) EXPECT_LE(trace[i].max_slack, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Catalog, CatalogRun, ::testing::ValuesIn(catalog_names()),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& ch : s) {
                             if (ch == '-') ch = '_';
                           }
                           return s;
                         });

}  // namespace
}  // namespace nsqp
