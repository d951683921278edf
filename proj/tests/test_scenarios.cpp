#include "hodyn/scenarios.hpp"

#include <gtest/gtest.h>

using namespace hodyn;

TEST(Scenarios, NamesAndUnknown) {
  EXPECT_EQ(scenario_names().size(), 5u);
  EXPECT_THROW(build_scenario("het-c"), std::invalid_argument);
}

TEST(Scenarios, SharedLayout) {
  const Vector x0 = (Vector(10) << -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5).finished();
  for (const auto& name : scenario_names()) {
    const auto s = build_scenario(name);
    EXPECT_TRUE(validate_config(s.cfg).ok()) << name << "\n" << validate_config(s.cfg).summary();
    EXPECT_EQ(s.cfg.n(), 10u);
    EXPECT_EQ(s.cfg.x0, x0) << name;
    ASSERT_EQ(s.cfg.complex.size(), 3u);
    EXPECT_EQ(s.cfg.complex.simplices[0].members, (IndexSet{6, 7, 8, 9}));
    EXPECT_EQ(s.cfg.complex.simplices[1].members, (IndexSet{0, 1, 2}));
    EXPECT_EQ(s.cfg.complex.simplices[2].members, (IndexSet{3, 4, 5}));
    for (double g : s.cfg.population.gamma) {
      EXPECT_GT(g, 0.0);
      EXPECT_LE(g, 1.0);
    }
  }
}

TEST(Scenarios, HeterogeneousPartition) {
  for (const char* name : {"het-a", "het-b"}) {
    const auto pop = build_scenario(name).cfg.population;
    for (int i = 0; i < 6; ++i) EXPECT_GT(pop.lambda[i], 0.0);
    for (int i = 6; i < 10; ++i) EXPECT_EQ(pop.lambda[i], 0.0);
    EXPECT_TRUE(pop.u.isZero(0.0));
  }
  // The adjustment keeps the random coefficients.
  EXPECT_EQ(build_scenario("het-a").cfg.population, build_scenario("het-b").cfg.population);
}

TEST(Scenarios, HomogeneousCoefficients) {
  const auto a = build_scenario("hom-a").cfg;
  const auto b = build_scenario("hom-b").cfg;
  EXPECT_EQ(a.population.u, a.x0);
  EXPECT_TRUE(b.population.u.isZero(0.0));
  EXPECT_EQ(a.population.lambda, b.population.lambda);
  EXPECT_TRUE(contraction_check(a.population).condition_holds);
  EXPECT_GT(a.population.lambda.minCoeff(), 0.0);
}

TEST(Scenarios, SeedControlsSampling) {
  EXPECT_EQ(build_scenario("hom-a", 5).cfg, build_scenario("hom-a", 5).cfg);
  EXPECT_FALSE(build_scenario("hom-a", 5).cfg == build_scenario("hom-a", 6).cfg);
}

TEST(Scenarios, HypothesisVerdicts) {
  EXPECT_FALSE(check_theorem31(System(build_scenario("het-a").cfg)).holds);
  EXPECT_TRUE(check_theorem31(System(build_scenario("het-b").cfg)).holds);
}

TEST(Scenarios, ExpectationsHoldAfterSimulation) {
  for (const auto& name : scenario_names()) {
    const auto s = build_scenario(name);
    const auto traj = simulate(System(s.cfg));
    const auto failures = check_expectations(s, traj);
    EXPECT_TRUE(failures.empty()) << name << ": " << (failures.empty() ? "" : failures.front());
  }
}

TEST(Scenarios, ExpectationFailuresAreReported) {
  auto s = build_scenario("het-a");
  s.expected.cluster_count = 3;
  const auto failures = check_expectations(s, simulate(System(s.cfg)));
  ASSERT_EQ(failures.size(), 1u);
  EXPECT_NE(failures[0].find("clusters"), std::string::npos);
}

TEST(RepeatExperiment, ZeroStartIsImmediateConsensus) {
  RepeatOptions opt;
  opt.x0_low = opt.x0_high = 0.0;
  const auto rep = run_repeat_experiment(build_scenario("appendix-l"), 1, 3, opt);
  ASSERT_EQ(rep.runs.size(), 1u);
  EXPECT_EQ(rep.passed, 1u);
  EXPECT_EQ(*rep.runs[0].convergence_step, 0u);
  EXPECT_EQ(*rep.runs[0].consensus, 0.0);
}

TEST(RepeatExperiment, DeterministicPerSeed) {
  const auto s = build_scenario("appendix-l");
  const auto a = run_repeat_experiment(s, 5, 42), b = run_repeat_experiment(s, 5, 42);
  ASSERT_EQ(a.runs.size(), 5u);
  for (std::size_t r = 0; r < 5; ++r) {
    EXPECT_EQ(a.runs[r].seed, b.runs[r].seed);
    EXPECT_EQ(a.runs[r].x0, b.runs[r].x0);
    EXPECT_EQ(a.runs[r].final_spread, b.runs[r].final_spread);
    EXPECT_EQ(a.runs[r].consensus, b.runs[r].consensus);
  }
  EXPECT_NE(a.runs[0].seed, a.runs[1].seed);
  EXPECT_EQ(a.passed, 5u);
}

TEST(RepeatExperiment, RejectsBadArguments) {
  const auto s = build_scenario("appendix-l");
  EXPECT_THROW(run_repeat_experiment(s, 0, 1), std::invalid_argument);
  RepeatOptions opt;
  opt.x0_low = 1.0;
  opt.x0_high = -1.0;
  EXPECT_THROW(run_repeat_experiment(s, 1, 1, opt), std::invalid_argument);
}
