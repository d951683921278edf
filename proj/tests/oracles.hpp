#pragma once

// Independent reference implementations used to derive expected values. They
// share no code with the library beyond the plain data types.

#include "hodyn/model.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace oracle {

using hodyn::IndexSet;
using hodyn::Matrix;

/// Weighted medians of `values` with integer weights `units` out of `total`:
/// every distinct value with weight strictly below and strictly above each at
/// most total/2, checked by direct summation.
inline std::vector<double> median_set(const std::vector<double>& values,
                                      const std::vector<long>& units, long total) {
  std::set<double> distinct(values.begin(), values.end());
  std::vector<double> out;
  for (double v : distinct) {
    long below = 0, above = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < v) below += units[i];
      if (values[i] > v) above += units[i];
    }
    if (2 * below <= total && 2 * above <= total) out.push_back(v);
  }
  return out;
}

/// Median nearest to `anchor`, smaller one on an exact tie.
inline double anchored(const std::vector<double>& set, double anchor) {
  double best = set.front();
  for (double v : set) {
    const double d = v > anchor ? v - anchor : anchor - v;
    const double bd = best > anchor ? best - anchor : anchor - best;
    if (d < bd || (d == bd && v < best)) best = v;
  }
  return best;
}

/// Converts a row given in 1/total units to integers, assuming it lies on the grid.
inline std::vector<long> to_units(const std::vector<double>& row, long total) {
  std::vector<long> u;
  for (double w : row) u.push_back(static_cast<long>(w * static_cast<double>(total) + 0.5));
  return u;
}

inline double row_mass(const Matrix& m, long row, const IndexSet& cols) {
  double s = 0.0;
  for (std::size_t c : cols) s += m(row, static_cast<long>(c));
  return s;
}

inline IndexSet from_mask(std::uint64_t mask, const IndexSet& universe) {
  IndexSet out;
  for (std::size_t b = 0; b < universe.size(); ++b)
    if (mask >> b & 1u) out.push_back(universe[b]);
  return out;
}

inline bool cohesive(const IndexSet& P, const Matrix& W) {
  for (std::size_t i : P)
    if (row_mass(W, static_cast<long>(i), P) < 0.5 - 1e-12) return false;
  return true;
}

/// Union of every cohesive subset of S, by enumerating all 2^|S| - 1 subsets.
inline IndexSet largest_cohesive_subset(const IndexSet& S, const Matrix& W) {
  std::set<std::size_t> acc;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << S.size()); ++mask) {
    const IndexSet P = from_mask(mask, S);
    if (cohesive(P, W)) acc.insert(P.begin(), P.end());
  }
  return IndexSet(acc.begin(), acc.end());
}

/// P is cohesive and some subset Q of simplices has all members in P and more
/// than half of every agent's environmental weight; every Q is enumerated.
inline bool influential_cluster(const IndexSet& P, const Matrix& W,
                                const hodyn::EnvironmentComplex& complex, const Matrix& M) {
  if (P.empty() || !cohesive(P, W)) return false;
  const std::set<std::size_t> inP(P.begin(), P.end());
  const std::size_t l = complex.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << l); ++mask) {
    bool inside = true;
    IndexSet Q;
    for (std::size_t k = 0; k < l; ++k) {
      if (!(mask >> k & 1u)) continue;
      Q.push_back(k);
      for (std::size_t a : complex.simplices[k].members) inside = inside && inP.count(a);
    }
    if (!inside) continue;
    bool weak = true;
    for (long i = 0; i < M.rows(); ++i) weak = weak && row_mass(M, i, Q) > 0.5 + 1e-12;
    if (weak) return true;
  }
  return false;
}

}  // namespace oracle
