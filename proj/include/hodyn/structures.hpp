#pragma once

// Cohesive agent sets, weak/strong cohesive group sets, cohesive influential
// clusters, and the sufficient condition for consensus with unopinionated agents.

#include "hodyn/model.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hodyn {

/// Exhaustive subset enumeration is attempted up to this many simplices.
inline constexpr std::size_t kMaxEnumeratedSimplices = 20;

namespace detail {

inline double mass_on(const Matrix& m, Eigen::Index row, std::span<const std::size_t> cols) {
  double s = 0.0;
  for (std::size_t c : cols) s += m(row, static_cast<Eigen::Index>(c));
  return s;
}

inline IndexSet normalized(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline IndexSet mask_to_set(std::uint64_t mask, std::span<const std::size_t> universe) {
  IndexSet out;
  for (std::size_t b = 0; b < universe.size(); ++b)
    if (mask & (std::uint64_t{1} << b)) out.push_back(universe[b]);
  return out;
}

}  // namespace detail

/// Every member keeps at least half of its agent-influence weight inside P.
inline bool is_cohesive_agent_set(std::span<const std::size_t> P, const Matrix& W) {
  if (P.empty()) throw std::invalid_argument("is_cohesive_agent_set: empty set");
  return std::all_of(P.begin(), P.end(), [&](std::size_t i) {
    return at_least_half(detail::mass_on(W, static_cast<Eigen::Index>(i), P));
  });
}

/// Chooses which removable agent to drop next; receives the sorted candidates.
using RemovalPolicy = std::function<std::size_t(std::span<const std::size_t>)>;

/// Largest cohesive subset of S, obtained by repeatedly removing agents that
/// keep less than half of their weight inside the working set. The default
/// policy removes the lowest-index candidate.
inline IndexSet maximal_cohesive_subset(std::span<const std::size_t> S, const Matrix& W,
                                        const RemovalPolicy& pick = {}) {
  IndexSet working = detail::normalized(IndexSet(S.begin(), S.end()));
  IndexSet removable;
  while (!working.empty()) {
    removable.clear();
    for (std::size_t i : working)
      if (!at_least_half(detail::mass_on(W, static_cast<Eigen::Index>(i), working)))
        removable.push_back(i);
    if (removable.empty()) break;
    const std::size_t victim = pick ? pick(removable) : removable.front();
    working.erase(std::find(working.begin(), working.end(), victim));
  }
  return working;
}

/// Every agent puts more than half of its environmental weight on Q.
inline bool is_weak_cohesive_group_set(std::span<const std::size_t> Q, const Matrix& M) {
  if (Q.empty()) throw std::invalid_argument("is_weak_cohesive_group_set: empty set");
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (!more_than_half(detail::mass_on(M, i, Q))) return false;
  return true;
}

inline bool simplex_within(const Simplex& s, std::span<const std::size_t> P) {
  return std::all_of(s.members.begin(), s.members.end(), [&](std::size_t a) {
    return std::binary_search(P.begin(), P.end(), a);
  });
}

/// Q is weak cohesive and every simplex of Q has all its members in P.
inline bool is_strong_cohesive_group_set(std::span<const std::size_t> Q,
                                         std::span<const std::size_t> P,
                                         const EnvironmentComplex& complex, const Matrix& M) {
  if (Q.empty() || P.empty())
    throw std::invalid_argument("is_strong_cohesive_group_set: empty set");
  const IndexSet sortedP = detail::normalized(IndexSet(P.begin(), P.end()));
  for (std::size_t k : Q) {
    if (k >= complex.size()) throw std::out_of_range("simplex index out of range");
    if (!simplex_within(complex.simplices[k], sortedP)) return false;
  }
  return is_weak_cohesive_group_set(Q, M);
}

/// Simplices whose member sets lie inside P.
inline IndexSet simplices_within(std::span<const std::size_t> P,
                                 const EnvironmentComplex& complex) {
  const IndexSet sortedP = detail::normalized(IndexSet(P.begin(), P.end()));
  IndexSet out;
  for (std::size_t k = 0; k < complex.size(); ++k)
    if (simplex_within(complex.simplices[k], sortedP)) out.push_back(k);
  return out;
}

struct WitnessSearch {
  std::optional<IndexSet> witness;
  bool exact = true;
};

/// Looks for a weak cohesive group set among `candidates`: the union first
/// (weak cohesion is monotone in Q), then subset enumeration when small enough.
inline WitnessSearch find_weak_witness(std::span<const std::size_t> candidates, const Matrix& M) {
  WitnessSearch result;
  if (candidates.empty()) return result;
  const IndexSet all(candidates.begin(), candidates.end());
  if (is_weak_cohesive_group_set(all, M)) {
    result.witness = all;
    return result;
  }
  if (all.size() > kMaxEnumeratedSimplices) {
    result.exact = false;
    return result;
  }
  const std::uint64_t limit = std::uint64_t{1} << all.size();
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    auto q = detail::mask_to_set(mask, all);
    if (is_weak_cohesive_group_set(q, M)) {
      result.witness = std::move(q);
      return result;
    }
  }
  return result;
}

inline WitnessSearch find_strong_witness(std::span<const std::size_t> P,
                                         const EnvironmentComplex& complex, const Matrix& M) {
  const IndexSet inside = simplices_within(P, complex);
  return find_weak_witness(inside, M);
}

/// P is a cohesive agent set and owns a strong cohesive group set.
inline bool is_cohesive_influential_cluster(std::span<const std::size_t> P, const Matrix& W,
                                            const EnvironmentComplex& complex, const Matrix& M) {
  if (P.empty()) return false;
  if (!is_cohesive_agent_set(P, W)) return false;
  return find_strong_witness(P, complex, M).witness.has_value();
}

struct HypothesisVerdict {
  bool holds = false;
  IndexSet cohesive_unopinionated;     // maximal cohesive subset of V2
  std::optional<IndexSet> weak_witness;  // all-opinionated weak cohesive group set
  std::vector<std::string> reasons;
  bool exact = true;
};

/// Simplices made only of opinionated agents.
inline IndexSet opinionated_simplices(const System& sys) {
  return simplices_within(sys.population().opinionated(), sys.complex());
}

/// Sufficient condition for consensus at the common bias: no cohesive set of
/// unopinionated agents, and some weak cohesive group set of opinionated simplices.
inline HypothesisVerdict check_theorem31(const System& sys) {
  HypothesisVerdict v;
  const IndexSet v2 = sys.population().unopinionated();
  v.cohesive_unopinionated = maximal_cohesive_subset(v2, sys.W());
  const bool no_cohesive_v2 = v.cohesive_unopinionated.empty();
  if (!no_cohesive_v2) {
    std::string ids;
    for (std::size_t i : v.cohesive_unopinionated) ids += (ids.empty() ? "" : ",") + std::to_string(i + 1);
    v.reasons.push_back("unopinionated agents {" + ids + "} form a cohesive agent set");
  }
  const auto search = find_weak_witness(opinionated_simplices(sys), sys.M());
  v.exact = search.exact;
  v.weak_witness = search.witness;
  if (!search.witness)
    v.reasons.push_back(search.exact
                            ? "no weak cohesive group set consists only of opinionated agents"
                            : "no weak cohesive group set of opinionated agents found "
                              "(exactness not guaranteed)");
  v.holds = no_cohesive_v2 && search.witness.has_value();
  return v;
}

struct ClusterEntry {
  IndexSet agents;
  IndexSet witness;  // strong cohesive group set owned by `agents`
};

struct StructureReport {
  IndexSet opinionated;
  IndexSet unopinionated;
  IndexSet maximal_cohesive_set;
  IndexSet maximal_cohesive_unopinionated;
  std::vector<IndexSet> weak_cohesive_group_sets;  // inclusion-minimal
  std::vector<ClusterEntry> strong_cohesive_group_sets;
  std::vector<IndexSet> cohesive_influential_clusters;
  HypothesisVerdict theorem31;
  bool exact = true;
};

/// Inclusion-minimal weak cohesive group sets (exhaustive for small l).
inline std::vector<IndexSet> minimal_weak_cohesive_group_sets(const System& sys, bool& exact) {
  std::vector<IndexSet> found;
  const std::size_t l = sys.l();
  if (l > kMaxEnumeratedSimplices) {
    exact = false;
    const IndexSet op = opinionated_simplices(sys);
    if (!op.empty() && is_weak_cohesive_group_set(op, sys.M())) found.push_back(op);
    const IndexSet all = all_indices(l);
    if (found.empty() || found.front() != all) found.push_back(all);
    return found;
  }
  std::vector<std::uint64_t> masks;
  const std::uint64_t limit = std::uint64_t{1} << l;
  std::vector<std::uint64_t> order;
  for (std::uint64_t m = 1; m < limit; ++m) order.push_back(m);
  std::stable_sort(order.begin(), order.end(), [](std::uint64_t a, std::uint64_t b) {
    return __builtin_popcountll(a) < __builtin_popcountll(b);
  });
  const IndexSet universe = all_indices(l);
  for (std::uint64_t m : order) {
    if (std::any_of(masks.begin(), masks.end(), [&](std::uint64_t f) { return (m & f) == f; }))
      continue;
    auto q = detail::mask_to_set(m, universe);
    if (is_weak_cohesive_group_set(q, sys.M())) {
      masks.push_back(m);
      found.push_back(std::move(q));
    }
  }
  return found;
}

inline StructureReport analyze_structure(const System& sys) {
  StructureReport r;
  r.opinionated = sys.population().opinionated();
  r.unopinionated = sys.population().unopinionated();
  r.maximal_cohesive_set = maximal_cohesive_subset(all_indices(sys.n()), sys.W());
  r.maximal_cohesive_unopinionated = maximal_cohesive_subset(r.unopinionated, sys.W());
  r.weak_cohesive_group_sets = minimal_weak_cohesive_group_sets(sys, r.exact);

  // Any cluster lies inside one of these maximal cohesive candidates, and the
  // strong witness of a subset is also a witness for the candidate.
  std::vector<IndexSet> candidates;
  if (!r.maximal_cohesive_set.empty()) candidates.push_back(r.maximal_cohesive_set);
  if (!r.maximal_cohesive_unopinionated.empty() &&
      r.maximal_cohesive_unopinionated != r.maximal_cohesive_set)
    candidates.push_back(r.maximal_cohesive_unopinionated);
  for (const auto& p : candidates) {
    const auto search = find_strong_witness(p, sys.complex(), sys.M());
    r.exact = r.exact && search.exact;
    if (search.witness) {
      r.strong_cohesive_group_sets.push_back({p, *search.witness});
      r.cohesive_influential_clusters.push_back(p);
    }
  }
  r.theorem31 = check_theorem31(sys);
  r.exact = r.exact && r.theorem31.exact;
  return r;
}

}  // namespace hodyn
