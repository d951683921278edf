#include "hodyn/dynamics.hpp"
#include "hodyn/scenarios.hpp"
#include "hodyn/verify.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hodyn;

namespace {

/// Three agents with hand-picked weights: lambda = (0.5, 0, 1), gamma = (0, 1, 0.5).
SystemConfig three_agents() {
  SystemConfig cfg;
  cfg.population.lambda = (Vector(3) << 0.5, 0.0, 1.0).finished();
  cfg.population.gamma = (Vector(3) << 0.0, 1.0, 0.5).finished();
  cfg.population.u = (Vector(3) << 0.0, 5.0, -1.0).finished();
  cfg.W.resize(3, 3);
  cfg.W << 0.2, 0.3, 0.5, 0.5, 0.25, 0.25, 0.1, 0.6, 0.3;
  cfg.complex.vertex_count = 3;
  cfg.complex.add_uniform({0, 1}).add_uniform({1, 2});
  cfg.M.resize(3, 2);
  cfg.M << 0.7, 0.3, 0.4, 0.6, 0.5, 0.5;
  cfg.x0 = (Vector(3) << 1.0, 2.0, 4.0).finished();
  return cfg;
}

SystemConfig with_gamma(SystemConfig cfg, double g) {
  cfg.population.gamma.setConstant(g);
  return cfg;
}

}  // namespace

TEST(ExternalOpinion, DegeneratesToEitherMedian) {
  const auto cfg = build_scenario("het-a").cfg;
  const Vector x = cfg.x0;
  const System agents_only(with_gamma(cfg, 0.0));
  EXPECT_EQ(external_opinion(x, agents_only), med_vector(x, cfg.W, x));
  const System env_only(with_gamma(cfg, 1.0));
  EXPECT_EQ(external_opinion(x, env_only), env_med_vector(x, env_only.A(), cfg.M, x));
}

TEST(ExternalOpinion, ConstantState) {
  const System sys(build_scenario("het-b").cfg);
  const Vector c = Vector::Constant(10, 3.25);
  EXPECT_EQ(external_opinion(c, sys), c);
  EXPECT_THROW(external_opinion(Vector::Zero(3), sys), std::invalid_argument);
}

TEST(Step, HandComposedThreeAgents) {
  const auto cfg = three_agents();
  const System sys(cfg);
  const std::vector<double> x{1, 2, 4};
  const std::vector<double> y{1.5, 3.0};  // means of {1,2} and {2,3}
  // Agent 1: agent median only (gamma 0), anchored at 1.
  const double e1 = oracle::anchored(oracle::median_set(x, {4, 6, 10}, 20), 1.0);
  // Agent 2: environment median only (gamma 1), unopinionated.
  const double e2 = oracle::anchored(oracle::median_set(y, {4, 6}, 10), 2.0);
  // Agent 3: fully anchored, its medians do not matter.
  const Vector expected = (Vector(3) << 0.5 * 0.0 + 0.5 * e1, e2, -1.0).finished();
  EXPECT_EQ(expected, (Vector(3) << 1.0, 3.0, -1.0).finished());
  EXPECT_EQ(step(cfg.x0, sys), expected);
}

TEST(Step, FullAnchoringAndBiasFixedPoint) {
  auto cfg = build_scenario("hom-b").cfg;
  cfg.population.lambda.setOnes();
  const System anchored(cfg);
  EXPECT_EQ(step(cfg.x0, anchored), cfg.population.u);

  auto fixed = build_scenario("hom-a").cfg;
  fixed.population.u.setConstant(0.4);
  fixed.x0.setConstant(0.4);
  EXPECT_EQ(step(fixed.x0, System(fixed)), fixed.x0);
}

TEST(StopRule, RejectsDegenerateSettings) {
  EXPECT_THROW((StopRule{0, 1e-10, 5, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((StopRule{10, 0.0, 5, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((StopRule{10, 1e-10, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((StopRule{10, 1e-10, 5, 0}.validate()), std::invalid_argument);
}

TEST(Simulate, FixedStartConvergesAtStepZero) {
  auto cfg = build_scenario("hom-b").cfg;
  cfg.x0.setZero();
  const Trajectory traj = simulate(System(cfg));
  ASSERT_TRUE(traj.converged);
  EXPECT_EQ(*traj.convergence_step, 0u);
  EXPECT_EQ(traj.steps(), StopRule{}.hold_steps);
  EXPECT_EQ(*detect_consensus(traj), 0.0);
}

TEST(Simulate, EqualBiasesReachConsensus) {
  const Trajectory traj = simulate(System(build_scenario("hom-b").cfg));
  ASSERT_TRUE(traj.converged);
  const auto c = detect_consensus(traj);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(*c, 0.0, 1e-6);
}

TEST(Simulate, UnopinionatedCohesiveGroupKeepsTwoClusters) {
  const auto s = build_scenario("het-a");
  const Trajectory traj = simulate(System(s.cfg));
  EXPECT_FALSE(detect_consensus(traj).has_value());
  EXPECT_EQ(opinion_clusters(traj.final_state(), 1e-5).size(), 2u);
}

TEST(Simulate, DistinctBiasesStayApart) {
  const Trajectory traj = simulate(System(build_scenario("hom-a").cfg));
  EXPECT_TRUE(traj.converged);
  EXPECT_FALSE(detect_consensus(traj).has_value());
}

TEST(Simulate, BudgetExhaustionIsNotConvergence) {
  StopRule rule;
  rule.max_steps = 10;
  const Trajectory traj = simulate(System(build_scenario("het-a").cfg), rule);
  EXPECT_FALSE(traj.converged);
  EXPECT_FALSE(traj.convergence_step.has_value());
  EXPECT_EQ(traj.steps(), 10u);
  EXPECT_EQ(traj.states.size(), 11u);
}

TEST(Simulate, StrideKeepsFinalState) {
  StopRule rule;
  rule.max_steps = 25;
  rule.stride = 10;
  const Trajectory traj = simulate(System(build_scenario("het-a").cfg), rule);
  EXPECT_EQ(traj.times, (std::vector<std::size_t>{0, 10, 20, 25}));
  EXPECT_EQ(traj.spread_history.size(), 26u);
}

TEST(Simulate, Deterministic) {
  const System sys(build_scenario("het-b").cfg);
  const Trajectory a = simulate(sys), b = simulate(sys);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) EXPECT_EQ(a.states[k], b.states[k]);
}

TEST(Consensus, MidpointOfFinalEnvelope) {
  Trajectory t;
  t.times = {0};
  t.states = {Vector::Constant(3, 1.5)};
  t.spread_history = {envelope_of(t.states[0])};
  EXPECT_EQ(*detect_consensus(t), 1.5);
  t.states = {(Vector(2) << 1.0, 1.0 + 4e-7).finished()};
  EXPECT_NEAR(*detect_consensus(t), 1.0 + 2e-7, 1e-15);
  t.states = {(Vector(2) << 1.0, 1.1).finished()};
  EXPECT_FALSE(detect_consensus(t).has_value());
  EXPECT_THROW(detect_consensus(Trajectory{}), std::invalid_argument);
}

TEST(Clusters, GapGrouping) {
  const Vector x = (Vector(5) << 0.0, 1.0, 1e-7, 1.0 + 2e-6, 5.0).finished();
  const auto c = opinion_clusters(x, 1e-5);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (IndexSet{0, 2}));
  EXPECT_EQ(c[1], (IndexSet{1, 3}));
  EXPECT_EQ(c[2], (IndexSet{4}));
}

TEST(DynamicsProperties, EnvelopeAndConfinement) {
  for (const auto& r : {check_envelope_monotone(8, 300), check_bias_side_absorbing(8, 300),
                        check_cluster_external_range(8, 300), check_cluster_confinement(8, 300)}) {
    EXPECT_EQ(r.trials, 300u) << r.name;
    EXPECT_EQ(r.failures, 0u) << r.name << ": " << r.witness;
  }
}

TEST(DynamicsProperties, LagWindowAndSqueezeOnAdjustedScenario) {
  const System sys(build_scenario("het-b").cfg);
  StopRule rule;
  rule.max_steps = 120;
  rule.tol_step = 1e-300;
  rule.hold_steps = 1000;
  const Trajectory traj = simulate(sys, rule);
  PropertyResult lag("lag"), squeeze("squeeze");
  check_hypothesis_bounds(sys, traj, lag, squeeze);
  EXPECT_GT(lag.trials, 100u);
  EXPECT_GT(squeeze.trials, 100u);
  EXPECT_EQ(lag.failures, 0u) << lag.witness;
  EXPECT_EQ(squeeze.failures, 0u) << squeeze.witness;
}
