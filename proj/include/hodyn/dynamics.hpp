#pragma once

#include "hodyn/median.hpp"
#include "hodyn/model.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hodyn {

struct StopRule {
  std::size_t max_steps = 10000;
  double tol_step = 1e-10;
  std::size_t hold_steps = 5;
  std::size_t stride = 1;  // record every stride-th state (the final state is always kept)

  void validate() const {
    if (max_steps < 1) throw std::invalid_argument("StopRule: max_steps must be >= 1");
    if (!(tol_step > 0.0)) throw std::invalid_argument("StopRule: tol_step must be > 0");
    if (hold_steps < 1) throw std::invalid_argument("StopRule: hold_steps must be >= 1");
    if (stride < 1) throw std::invalid_argument("StopRule: stride must be >= 1");
  }
};

inline constexpr double kDefaultConsensusTol = 1e-6;

struct Envelope {
  double min = 0.0;
  double max = 0.0;

  double spread() const { return max - min; }
};

inline Envelope envelope_of(const Vector& x) { return {x.minCoeff(), x.maxCoeff()}; }

struct Trajectory {
  std::vector<std::size_t> times;  // time index of each recorded state
  std::vector<Vector> states;
  bool converged = false;
  std::optional<std::size_t> convergence_step;
  std::vector<Envelope> spread_history;  // one entry per step 0..steps()

  std::size_t steps() const { return spread_history.empty() ? 0 : spread_history.size() - 1; }
  const Vector& final_state() const { return states.back(); }
};

/// E(x) = (I - Gamma) Med(x; W) + Gamma Med(Ax; M), anchored at x.
inline Vector external_opinion(const Vector& x, const System& sys) {
  if (static_cast<std::size_t>(x.size()) != sys.n())
    throw std::invalid_argument("external_opinion: state has wrong dimension");
  const auto& gamma = sys.population().gamma;
  const Vector agent_med = med_vector(x, sys.W(), x);
  const Vector env_med = env_med_vector(x, sys.A(), sys.M(), x);
  Vector e(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    e[i] = (1.0 - gamma[i]) * agent_med[i] + gamma[i] * env_med[i];
  return e;
}

/// x(t+1) = Lambda u + (I - Lambda) E(x(t)); unopinionated agents take E(x) exactly.
inline Vector step(const Vector& x, const System& sys) {
  const auto& pop = sys.population();
  const Vector e = external_opinion(x, sys);
  Vector next(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double lam = pop.lambda[i];
    next[i] = lam > 0.0 ? lam * pop.u[i] + (1.0 - lam) * e[i] : e[i];
  }
  return next;
}

/// Synchronous iteration from x0 until `hold_steps` consecutive increments fall
/// below `tol_step` (in the sup norm) or `max_steps` is exhausted.
inline Trajectory simulate(const System& sys, const Vector& x0, const StopRule& rule = {}) {
  rule.validate();
  if (static_cast<std::size_t>(x0.size()) != sys.n())
    throw std::invalid_argument("simulate: initial state has wrong dimension");

  Trajectory traj;
  Vector x = x0;
  traj.times.push_back(0);
  traj.states.push_back(x);
  traj.spread_history.push_back(envelope_of(x));

  std::size_t run = 0;
  for (std::size_t t = 0; t < rule.max_steps; ++t) {
    Vector next = step(x, sys);
    const double delta = inf_norm(next - x);
    x = std::move(next);
    traj.spread_history.push_back(envelope_of(x));
    run = delta < rule.tol_step ? run + 1 : 0;
    const bool done = run >= rule.hold_steps;
    if ((t + 1) % rule.stride == 0 || done || t + 1 == rule.max_steps) {
      traj.times.push_back(t + 1);
      traj.states.push_back(x);
    }
    if (done) {
      traj.converged = true;
      traj.convergence_step = t + 1 - rule.hold_steps;
      break;
    }
  }
  return traj;
}

inline Trajectory simulate(const System& sys, const StopRule& rule = {}) {
  return simulate(sys, sys.config().x0, rule);
}

/// Midpoint of the final envelope when its spread is below `tol`.
inline std::optional<double> detect_consensus(const Trajectory& traj,
                                              double tol = kDefaultConsensusTol) {
  if (traj.states.empty()) throw std::invalid_argument("detect_consensus: empty trajectory");
  const auto env = envelope_of(traj.final_state());
  if (env.spread() < tol) return 0.5 * (env.min + env.max);
  return std::nullopt;
}

/// Groups opinions into clusters separated by gaps larger than `gap`.
/// Each cluster is a sorted list of agent indices; clusters are ordered by opinion.
inline std::vector<IndexSet> opinion_clusters(const Vector& x, double gap) {
  IndexSet order = all_indices(static_cast<std::size_t>(x.size()));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[static_cast<Eigen::Index>(a)] < x[static_cast<Eigen::Index>(b)];
  });
  std::vector<IndexSet> clusters;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = x[static_cast<Eigen::Index>(order[k])];
    if (k == 0 || v - x[static_cast<Eigen::Index>(order[k - 1])] > gap) clusters.emplace_back();
    clusters.back().push_back(order[k]);
  }
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  return clusters;
}

}  // namespace hodyn
