#pragma once

#include "hodyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hodyn {

/// Every distinct entry v of `values` with
///   sum{w_i : values_i < v} <= 1/2  and  sum{w_i : values_i > v} <= 1/2,
/// returned in ascending order. The result is never empty for valid weights.
inline std::vector<double> weighted_median_set(std::span<const double> values,
                                               std::span<const double> weights) {
  if (values.empty()) throw std::invalid_argument("weighted median of an empty sample");
  if (values.size() != weights.size())
    throw std::invalid_argument("weighted median: values and weights differ in length");

  std::vector<std::pair<double, double>> entries;
  entries.reserve(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("weighted median: negative weight");
    entries.emplace_back(values[i], weights[i]);
    total += weights[i];
  }
  if (std::abs(total - 1.0) > kRowTolerance)
    throw std::invalid_argument("weighted median: weights do not sum to 1");

  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Aggregate ties by value.
  std::vector<std::pair<double, double>> groups;
  for (const auto& [v, w] : entries) {
    if (!groups.empty() && groups.back().first == v)
      groups.back().second += w;
    else
      groups.emplace_back(v, w);
  }

  const std::size_t g = groups.size();
  std::vector<double> below(g, 0.0), above(g, 0.0);
  for (std::size_t j = 1; j < g; ++j) below[j] = below[j - 1] + groups[j - 1].second;
  for (std::size_t j = g - 1; j-- > 0;) above[j] = above[j + 1] + groups[j + 1].second;

  std::vector<double> out;
  for (std::size_t j = 0; j < g; ++j)
    if (at_most_half(below[j]) && at_most_half(above[j])) out.push_back(groups[j].first);
  return out;
}

/// Element of `set` closest to `anchor`; equidistant candidates resolve to the smaller.
inline double closest_to_anchor(std::span<const double> set, double anchor) {
  if (set.empty()) throw std::invalid_argument("closest_to_anchor: empty set");
  double best = set.front();
  double best_dist = std::abs(best - anchor);
  for (double v : set.subspan(1)) {
    const double d = std::abs(v - anchor);
    if (d < best_dist || (d == best_dist && v < best)) {
      best = v;
      best_dist = d;
    }
  }
  return best;
}

/// The weighted median nearest to `anchor` (smaller value on an exact tie).
inline double weighted_median(std::span<const double> values, std::span<const double> weights,
                              double anchor) {
  const auto set = weighted_median_set(values, weights);
  return closest_to_anchor(set, anchor);
}

namespace detail {

inline std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<const double> vec_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace detail

/// Stacked per-row medians: component i is the median of `values` under row i of
/// `weights`, anchored at anchors[i]. `weights` may be non-square.
inline Vector stacked_medians(const Vector& values, const Matrix& weights, const Vector& anchors) {
  if (weights.cols() != values.size())
    throw std::invalid_argument("median rows have " + std::to_string(weights.cols()) +
                                " weights but there are " + std::to_string(values.size()) +
                                " values");
  if (anchors.size() != weights.rows())
    throw std::invalid_argument("anchor count does not match the number of weight rows");
  Vector out(weights.rows());
  const auto vals = detail::vec_span(values);
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    out[i] = weighted_median(vals, detail::row_span(weights, i), anchors[i]);
  return out;
}

/// Med(x; W) with each agent anchored at its own opinion.
inline Vector med_vector(const Vector& x, const Matrix& W, const Vector& anchors) {
  if (W.rows() != W.cols()) throw std::invalid_argument("med_vector: W is not square");
  return stacked_medians(x, W, anchors);
}

/// Med(Ax; M): medians of the environment opinions under the rows of M.
inline Vector env_med_vector(const Vector& x, const Matrix& A, const Matrix& M,
                             const Vector& anchors) {
  if (M.cols() != A.rows())
    throw std::invalid_argument("env_med_vector: M has " + std::to_string(M.cols()) +
                                " columns but A has " + std::to_string(A.rows()) + " rows");
  return stacked_medians(environment_opinion(A, x), M, anchors);
}

}  // namespace hodyn
