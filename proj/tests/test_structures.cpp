#include "hodyn/scenarios.hpp"
#include "hodyn/structures.hpp"
#include "hodyn/verify.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hodyn;

TEST(CohesiveAgentSet, Basics) {
  const Matrix I = Matrix::Identity(4, 4);
  EXPECT_TRUE(is_cohesive_agent_set(IndexSet{1, 3}, I));
  Matrix W(2, 2);
  W << 0.0, 1.0, 1.0, 0.0;
  EXPECT_FALSE(is_cohesive_agent_set(IndexSet{0}, W));
  EXPECT_TRUE(is_cohesive_agent_set(IndexSet{0, 1}, W));
  EXPECT_THROW(is_cohesive_agent_set(IndexSet{}, W), std::invalid_argument);
}

TEST(CohesiveAgentSet, ExactlyHalfCounts) {
  Matrix W(2, 2);
  W << 0.5, 0.5, 0.3, 0.7;
  EXPECT_TRUE(is_cohesive_agent_set(IndexSet{0}, W));
  W << 0.5, 0.5, 0.6, 0.4;
  EXPECT_FALSE(is_cohesive_agent_set(IndexSet{1}, W));
}

TEST(CohesiveAgentSet, UnopinionatedGroupBeforeAdjustment) {
  const Matrix before = build_scenario("het-a").cfg.W;
  const Matrix after = build_scenario("het-b").cfg.W;
  const IndexSet group{6, 7, 8, 9};
  EXPECT_TRUE(is_cohesive_agent_set(group, before));
  EXPECT_FALSE(is_cohesive_agent_set(group, after));
  // The interchanges swap agent 7's weights on agents 1/8 and 4/9.
  EXPECT_EQ(before(6, 0), after(6, 7));
  EXPECT_EQ(before(6, 7), after(6, 0));
  EXPECT_EQ(before(6, 3), after(6, 8));
  EXPECT_EQ(before(6, 8), after(6, 3));
}

TEST(Peeling, IdentityKeepsEverything) {
  EXPECT_EQ(maximal_cohesive_subset(all_indices(5), Matrix::Identity(5, 5)), all_indices(5));
}

TEST(Peeling, OutwardChainCollapses) {
  // Agent i listens only to agent i+1 (the last to agent 0, outside S).
  Matrix W = Matrix::Zero(5, 5);
  for (int i = 0; i < 4; ++i) W(i, i + 1) = 1.0;
  W(4, 0) = 1.0;
  EXPECT_TRUE(maximal_cohesive_subset(IndexSet{1, 2, 3, 4}, W).empty());
}

TEST(Peeling, UnopinionatedResidueInScenarios) {
  EXPECT_EQ(maximal_cohesive_subset(IndexSet{6, 7, 8, 9}, build_scenario("het-a").cfg.W),
            (IndexSet{6, 7, 8, 9}));
  EXPECT_TRUE(maximal_cohesive_subset(IndexSet{6, 7, 8, 9}, build_scenario("het-b").cfg.W).empty());
}

TEST(Peeling, MatchesSubsetEnumerationOnEightAgents) {
  std::mt19937_64 rng(2024);
  int nonempty = 0;
  for (int trial = 0; trial < 250; ++trial) {
    Matrix W = Matrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i) {
      // Self-heavy rows make cohesive sets common.
      const int self = static_cast<int>(rng() % 7);
      W(i, i) += self / 10.0;
      for (int u = self; u < 10; ++u) W(i, static_cast<long>(rng() % 8)) += 0.1;
    }
    const IndexSet S = all_indices(8);
    const IndexSet expected = oracle::largest_cohesive_subset(S, W);
    nonempty += !expected.empty();
    ASSERT_EQ(maximal_cohesive_subset(S, W), expected) << "trial " << trial;
  }
  EXPECT_GT(nonempty, 20);
}

TEST(Peeling, PropertyBattery) {
  for (const auto& r : {check_peeling_exhaustive(4, 200), check_peeling_order_independent(4, 200),
                        check_weak_cohesion_monotone(4, 300)}) {
    EXPECT_GE(r.trials, 200u) << r.name;
    EXPECT_EQ(r.failures, 0u) << r.name << ": " << r.witness;
  }
}

TEST(WeakCohesiveGroupSet, Basics) {
  Matrix M = Matrix::Zero(3, 2);
  M.col(1).setOnes();
  EXPECT_TRUE(is_weak_cohesive_group_set(IndexSet{1}, M));
  EXPECT_FALSE(is_weak_cohesive_group_set(IndexSet{0}, M));
  const Matrix R = build_scenario("het-a").cfg.M;
  EXPECT_TRUE(is_weak_cohesive_group_set(IndexSet{0, 1, 2}, R));
  EXPECT_THROW(is_weak_cohesive_group_set(IndexSet{}, R), std::invalid_argument);
}

TEST(WeakCohesiveGroupSet, ExactlyHalfIsNotEnough) {
  Matrix M(1, 2);
  M << 0.5, 0.5;
  EXPECT_FALSE(is_weak_cohesive_group_set(IndexSet{0}, M));
}

TEST(WeakCohesiveGroupSet, OpinionatedPairAfterAdjustment) {
  const IndexSet pair{1, 2};  // {1,2,3} and {4,5,6}
  EXPECT_TRUE(is_weak_cohesive_group_set(pair, build_scenario("het-b").cfg.M));
  EXPECT_FALSE(is_weak_cohesive_group_set(pair, build_scenario("het-a").cfg.M));
}

TEST(StrongCohesiveGroupSet, MembersMustLieInsideP) {
  EnvironmentComplex c;
  c.vertex_count = 4;
  c.add_uniform({0, 1}).add_uniform({1, 2, 3});
  Matrix M(4, 2);
  M << 0.9, 0.1, 0.8, 0.2, 0.6, 0.4, 0.7, 0.3;
  EXPECT_TRUE(is_strong_cohesive_group_set(IndexSet{0}, IndexSet{0, 1}, c, M));
  EXPECT_FALSE(is_strong_cohesive_group_set(IndexSet{1}, IndexSet{1, 2}, c, M));  // member 4 outside
  EXPECT_FALSE(is_strong_cohesive_group_set(IndexSet{0, 1}, IndexSet{0, 1}, c, M));
  EXPECT_THROW(is_strong_cohesive_group_set(IndexSet{}, IndexSet{0}, c, M), std::invalid_argument);
}

TEST(StrongCohesiveGroupSet, ResearchLab) {
  // A lab (simplex of agents 1-3) that every agent weighs at 0.6; a seminar
  // including an outsider carries the rest.
  EnvironmentComplex c;
  c.vertex_count = 5;
  c.add_uniform({0, 1, 2}).add_uniform({2, 3, 4});
  Matrix M(5, 2);
  for (int i = 0; i < 5; ++i) M.row(i) << 0.6, 0.4;
  const IndexSet lab{0, 1, 2};
  double least = 1.0;
  for (int i = 0; i < 5; ++i) least = std::min(least, M(i, 0));
  EXPECT_GT(least, 0.5);
  EXPECT_TRUE(is_strong_cohesive_group_set(IndexSet{0}, lab, c, M));
}

TEST(InfluentialCluster, TrivialAndNoSimplexInside) {
  EnvironmentComplex one;
  one.vertex_count = 1;
  one.add_uniform({0});
  EXPECT_TRUE(is_cohesive_influential_cluster(IndexSet{0}, Matrix::Identity(1, 1), one,
                                              Matrix::Identity(1, 1)));
  EnvironmentComplex c;
  c.vertex_count = 3;
  c.add_uniform({0, 1, 2});
  EXPECT_FALSE(is_cohesive_influential_cluster(IndexSet{0, 1}, Matrix::Identity(3, 3), c,
                                               Matrix::Ones(3, 1)));
  EXPECT_FALSE(is_cohesive_influential_cluster(IndexSet{}, Matrix::Identity(3, 3), c, Matrix::Ones(3, 1)));
}

TEST(InfluentialCluster, MatchesExhaustiveWitnessSearch) {
  gen::Rng rng(77);
  int positives = 0;
  for (int trial = 0; trial < 400; ++trial) {
    IndexSet P;
    SystemConfig cfg;
    if (trial % 2 == 0) {
      cfg = gen::cluster_config(rng, P);
    } else {
      gen::ConfigShape shape;
      shape.l_max = 6;
      shape.grid_weights = true;
      cfg = gen::config(rng, shape);
      P = gen::nonempty_subset(rng, cfg.n());
    }
    const bool expected = oracle::influential_cluster(P, cfg.W, cfg.complex, cfg.M);
    positives += expected;
    ASSERT_EQ(is_cohesive_influential_cluster(P, cfg.W, cfg.complex, cfg.M), expected)
        << "trial " << trial;
  }
  EXPECT_GT(positives, 100);
}

TEST(ConsensusHypothesis, FailsWithCohesiveUnopinionatedGroup) {
  const auto v = check_theorem31(System(build_scenario("het-a").cfg));
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.cohesive_unopinionated, (IndexSet{6, 7, 8, 9}));
  ASSERT_FALSE(v.reasons.empty());
  EXPECT_NE(v.reasons.front().find("{7,8,9,10}"), std::string::npos) << v.reasons.front();
}

TEST(ConsensusHypothesis, HoldsAfterAdjustment) {
  const auto v = check_theorem31(System(build_scenario("het-b").cfg));
  EXPECT_TRUE(v.holds);
  EXPECT_TRUE(v.reasons.empty());
  ASSERT_TRUE(v.weak_witness.has_value());
  EXPECT_EQ(*v.weak_witness, (IndexSet{1, 2}));
}

TEST(ConsensusHypothesis, NoUnopinionatedAgents) {
  EXPECT_TRUE(check_theorem31(System(build_scenario("hom-b").cfg)).holds);
}

TEST(ConsensusHypothesis, ImpliesConsensusOnRandomConfigs) {
  gen::Rng rng(99);
  StopRule rule;
  rule.max_steps = 20000;
  for (int trial = 0; trial < 60; ++trial) {
    const System sys(gen::hypothesis_config(rng));
    ASSERT_TRUE(check_theorem31(sys).holds);
    const double u = sys.population().u[0];
    const auto traj = simulate(sys, rule);
    const auto env = envelope_of(traj.final_state());
    EXPECT_LT(env.spread(), 1e-6) << "trial " << trial;
    EXPECT_NEAR(0.5 * (env.min + env.max), u, 1e-6) << "trial " << trial;
  }
}

TEST(StructureReport, EverySetReverifies) {
  for (const auto& name : scenario_names()) {
    const System sys(build_scenario(name).cfg);
    const auto r = analyze_structure(sys);
    EXPECT_TRUE(r.exact);
    if (!r.maximal_cohesive_set.empty()) {
      EXPECT_TRUE(is_cohesive_agent_set(r.maximal_cohesive_set, sys.W()));
    }
    for (const auto& q : r.weak_cohesive_group_sets) EXPECT_TRUE(is_weak_cohesive_group_set(q, sys.M()));
    for (const auto& e : r.strong_cohesive_group_sets)
      EXPECT_TRUE(is_strong_cohesive_group_set(e.witness, e.agents, sys.complex(), sys.M()));
    for (const auto& p : r.cohesive_influential_clusters)
      EXPECT_TRUE(is_cohesive_influential_cluster(p, sys.W(), sys.complex(), sys.M()));
  }
}

TEST(StructureReport, TenAgentScenarios) {
  const auto a = analyze_structure(System(build_scenario("het-a").cfg));
  EXPECT_EQ(a.maximal_cohesive_unopinionated, (IndexSet{6, 7, 8, 9}));
  EXPECT_FALSE(a.theorem31.holds);
  const auto b = analyze_structure(System(build_scenario("het-b").cfg));
  EXPECT_TRUE(b.maximal_cohesive_unopinionated.empty());
  EXPECT_TRUE(b.theorem31.holds);
}
