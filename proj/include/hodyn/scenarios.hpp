#pragma once

// Built-in experiment configurations on the ten-agent, three-simplex complex
//   C1 = {7,8,9,10}, C2 = {1,2,3}, C3 = {4,5,6}
// and the seeded repeat experiment over random initial opinions.
//
// Figure edge weights are not machine readable, so W and M are reconstructions
// that satisfy every structural property the experiments rely on:
//   het-a  {7..10} is a cohesive set of unopinionated agents; {C2,C3} is not
//          weak cohesive.
//   het-b  agent 7's weights from agents 1 and 8 are interchanged, and those
//          from 4 and 9; no cohesive unopinionated set remains, and M is
//          reweighted so {C2,C3} is weak cohesive.
//   hom-*  the het-a network with every agent opinionated.

#include "hodyn/dynamics.hpp"
#include "hodyn/fixedpoint.hpp"
#include "hodyn/model.hpp"
#include "hodyn/structures.hpp"

#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hodyn {

inline constexpr std::uint64_t kDefaultScenarioSeed = 20240917;

struct Expectations {
  std::optional<double> consensus_value;
  std::optional<double> opinionated_value;  // every opinionated agent ends here
  std::optional<std::size_t> cluster_count;
  std::optional<bool> theorem31_holds;
  std::optional<bool> contraction_holds;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = kDefaultScenarioSeed;
  SystemConfig cfg;
  Expectations expected;
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"het-a", "het-b", "hom-a", "hom-b", "appendix-l"};
  return names;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform on (0, 1].
inline double unit_open_zero(std::mt19937_64& rng) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Matrix matrix_from(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector reference_initial_opinions() {
  Vector x(10);
  x << -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5;
  return x;
}

inline EnvironmentComplex ten_agent_complex() {
  EnvironmentComplex c;
  c.vertex_count = 10;
  c.add_uniform({6, 7, 8, 9}).add_uniform({0, 1, 2}).add_uniform({3, 4, 5});
  return c;
}

// Rows are agents 1..10, columns agents 1..10.
inline Matrix network_before_adjustment() {
  return matrix_from({
      {0.0, 0.4, 0.3, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0},
      {0.4, 0.0, 0.4, 0.0, 0.0, 0.0, 0.0, 0.2, 0.0, 0.0},
      {0.3, 0.3, 0.0, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.0, 0.4, 0.3, 0.0, 0.0, 0.3, 0.0},
      {0.0, 0.0, 0.0, 0.4, 0.0, 0.4, 0.0, 0.0, 0.0, 0.2},
      {0.0, 0.0, 0.4, 0.3, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0},
      {0.1, 0.0, 0.0, 0.1, 0.0, 0.0, 0.0, 0.4, 0.4, 0.0},
      {0.0, 0.4, 0.0, 0.0, 0.0, 0.0, 0.4, 0.0, 0.0, 0.2},
      {0.0, 0.0, 0.0, 0.0, 0.4, 0.0, 0.4, 0.2, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.0, 0.0, 0.4, 0.4, 0.0, 0.2, 0.0},
  });
}

inline Matrix network_after_adjustment() {
  Matrix w = network_before_adjustment();
  // Agent 7 (row 6): interchange the weights from agents 1 and 8, and from 4 and 9.
  std::swap(w(6, 0), w(6, 7));
  std::swap(w(6, 3), w(6, 8));
  return w;
}

// Rows are agents, columns simplices C1, C2, C3.
inline Matrix environment_before_adjustment() {
  return matrix_from({
      {0.1, 0.6, 0.3},
      {0.1, 0.6, 0.3},
      {0.1, 0.6, 0.3},
      {0.1, 0.3, 0.6},
      {0.1, 0.3, 0.6},
      {0.1, 0.3, 0.6},
      {0.8, 0.1, 0.1},
      {0.8, 0.1, 0.1},
      {0.8, 0.1, 0.1},
      {0.8, 0.1, 0.1},
  });
}

inline Matrix environment_after_adjustment() {
  Matrix m = environment_before_adjustment();
  for (Eigen::Index i = 6; i < 10; ++i) m.row(i) << 0.2, 0.4, 0.4;
  return m;
}

inline SystemConfig heterogeneous(std::uint64_t seed, bool adjusted) {
  std::mt19937_64 rng(seed);
  SystemConfig cfg;
  cfg.population.lambda = Vector::Zero(10);
  cfg.population.gamma = Vector::Zero(10);
  cfg.population.u = Vector::Zero(10);
  for (Eigen::Index i = 0; i < 6; ++i) cfg.population.lambda[i] = unit_open_zero(rng);
  for (Eigen::Index i = 0; i < 10; ++i) cfg.population.gamma[i] = unit_open_zero(rng);
  cfg.W = adjusted ? network_after_adjustment() : network_before_adjustment();
  cfg.complex = ten_agent_complex();
  cfg.M = adjusted ? environment_after_adjustment() : environment_before_adjustment();
  cfg.x0 = reference_initial_opinions();
  return cfg;
}

/// lambda, gamma uniform on (0,1], redrawn until (1 - lambda_min) gamma_max < lambda_min.
inline SystemConfig homogeneous(std::uint64_t seed, bool common_bias) {
  std::mt19937_64 rng(seed);
  SystemConfig cfg;
  cfg.population.lambda = Vector(10);
  cfg.population.gamma = Vector(10);
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt > 100000000) throw std::runtime_error("homogeneous: rejection sampling failed");
    for (Eigen::Index i = 0; i < 10; ++i) cfg.population.lambda[i] = unit_open_zero(rng);
    for (Eigen::Index i = 0; i < 10; ++i) cfg.population.gamma[i] = unit_open_zero(rng);
    const double lmin = cfg.population.lambda.minCoeff();
    if ((1.0 - lmin) * cfg.population.gamma.maxCoeff() < lmin) break;
  }
  cfg.x0 = reference_initial_opinions();
  cfg.population.u = common_bias ? Vector::Zero(10) : Vector(cfg.x0);
  cfg.W = network_before_adjustment();
  cfg.complex = ten_agent_complex();
  cfg.M = environment_before_adjustment();
  return cfg;
}

}  // namespace detail

inline Scenario build_scenario(const std::string& name,
                               std::uint64_t seed = kDefaultScenarioSeed) {
  Scenario s;
  s.name = name;
  s.seed = seed;
  if (name == "het-a") {
    s.cfg = detail::heterogeneous(seed, false);
    s.expected.cluster_count = 2;
    s.expected.opinionated_value = 0.0;
    s.expected.theorem31_holds = false;
  } else if (name == "het-b") {
    s.cfg = detail::heterogeneous(seed, true);
    s.expected.consensus_value = 0.0;
    s.expected.theorem31_holds = true;
  } else if (name == "hom-a") {
    s.cfg = detail::homogeneous(seed, false);
    s.expected.contraction_holds = true;
  } else if (name == "hom-b" || name == "appendix-l") {
    s.cfg = detail::homogeneous(seed, true);
    s.expected.contraction_holds = true;
    s.expected.consensus_value = 0.0;
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  return s;
}

/// Compares a finished run against the scenario's declared expectations.
/// Returns one message per unmet expectation.
inline std::vector<std::string> check_expectations(const Scenario& s, const Trajectory& traj,
                                                   double consensus_tol = kDefaultConsensusTol) {
  std::vector<std::string> failures;
  const System sys(s.cfg);
  const Vector& xf = traj.final_state();
  if (s.expected.consensus_value) {
    const auto c = detect_consensus(traj, consensus_tol);
    if (!c)
      failures.push_back("no consensus: final spread " +
                         std::to_string(envelope_of(xf).spread()));
    else if (std::abs(*c - *s.expected.consensus_value) > consensus_tol)
      failures.push_back("consensus value " + std::to_string(*c) + " differs from expected " +
                         std::to_string(*s.expected.consensus_value));
  }
  if (s.expected.opinionated_value) {
    for (std::size_t i : s.cfg.population.opinionated())
      if (std::abs(xf[static_cast<Eigen::Index>(i)] - *s.expected.opinionated_value) >
          consensus_tol)
        failures.push_back("opinionated agent " + std::to_string(i + 1) + " ends at " +
                           std::to_string(xf[static_cast<Eigen::Index>(i)]));
  }
  if (s.expected.cluster_count) {
    const auto clusters = opinion_clusters(xf, 10.0 * consensus_tol);
    if (clusters.size() != *s.expected.cluster_count)
      failures.push_back("found " + std::to_string(clusters.size()) + " clusters, expected " +
                         std::to_string(*s.expected.cluster_count));
  }
  if (s.expected.theorem31_holds) {
    const bool holds = check_theorem31(sys).holds;
    if (holds != *s.expected.theorem31_holds)
      failures.push_back(std::string("consensus hypothesis check returned ") +
                         (holds ? "true" : "false"));
  }
  if (s.expected.contraction_holds) {
    const bool holds = contraction_check(s.cfg.population).condition_holds;
    if (holds != *s.expected.contraction_holds)
      failures.push_back(std::string("contraction condition returned ") +
                         (holds ? "true" : "false"));
  }
  return failures;
}

struct RepeatOptions {
  double x0_low = -10.0;
  double x0_high = 10.0;
  StopRule rule{};
  double consensus_tol = kDefaultConsensusTol;
};

struct RunRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Vector x0;
  bool converged = false;
  std::optional<std::size_t> convergence_step;
  double final_spread = 0.0;
  std::optional<double> consensus;
  bool passed = false;
};

struct RepeatReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t repetitions = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<RunRecord> runs;
};

/// Re-runs `base` with initial opinions drawn uniformly from [x0_low, x0_high].
/// Each repetition has its own derived seed; repetitions run concurrently.
inline RepeatReport run_repeat_experiment(const Scenario& base, std::size_t repetitions,
                                          std::uint64_t seed, const RepeatOptions& opt = {}) {
  if (repetitions < 1) throw std::invalid_argument("run_repeat_experiment: repetitions must be >= 1");
  if (opt.x0_high < opt.x0_low) throw std::invalid_argument("run_repeat_experiment: empty x0 range");
  const System sys(base.cfg);

  auto run_one = [&](std::size_t r) {
    RunRecord rec;
    rec.index = r;
    rec.seed = detail::splitmix64(seed + r);
    std::mt19937_64 rng(rec.seed);
    rec.x0 = Vector(static_cast<Eigen::Index>(sys.n()));
    for (Eigen::Index i = 0; i < rec.x0.size(); ++i)
      rec.x0[i] = opt.x0_low == opt.x0_high
                      ? opt.x0_low
                      : std::uniform_real_distribution<double>(opt.x0_low, opt.x0_high)(rng);
    const Trajectory traj = simulate(sys, rec.x0, opt.rule);
    rec.converged = traj.converged;
    rec.convergence_step = traj.convergence_step;
    rec.final_spread = envelope_of(traj.final_state()).spread();
    rec.consensus = detect_consensus(traj, opt.consensus_tol);
    rec.passed = rec.consensus.has_value() &&
                 (!base.expected.consensus_value ||
                  std::abs(*rec.consensus - *base.expected.consensus_value) <= opt.consensus_tol);
    return rec;
  };

  std::vector<std::future<RunRecord>> futures;
  futures.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r)
    futures.push_back(std::async(std::launch::async, run_one, r));

  RepeatReport report;
  report.scenario = base.name;
  report.seed = seed;
  report.repetitions = repetitions;
  for (auto& f : futures) {
    report.runs.push_back(f.get());
    (report.runs.back().passed ? report.passed : report.failed) += 1;
  }
  return report;
}

}  // namespace hodyn
