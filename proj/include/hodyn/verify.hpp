#pragma once

// Randomized property battery over the whole library. Every property is a pure
// function of (seed, cases), so two runs with the same arguments print the same
// report. Informational properties count violations but never fail the run.

#include "hodyn/dynamics.hpp"
#include "hodyn/fixedpoint.hpp"
#include "hodyn/median.hpp"
#include "hodyn/model.hpp"
#include "hodyn/scenarios.hpp"
#include "hodyn/structures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace hodyn {

// ---------------------------------------------------------------------------
// Random instance generators

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// Uniform on (0, 1].
inline double unit_open_zero(Rng& rng) { return 1.0 - uniform(rng, 0.0, 1.0); }

inline Vector real_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

/// Small integers, to provoke ties.
inline Vector integer_vector(Rng& rng, std::size_t n, int lo = -2, int hi = 2) {
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = std::uniform_int_distribution<int>(lo, hi)(rng);
  return v;
}

inline Vector mixed_vector(Rng& rng, std::size_t n) {
  return coin(rng) ? real_vector(rng, n) : integer_vector(rng, n);
}

inline IndexSet subset(Rng& rng, std::size_t n, double p = 0.5) {
  IndexSet s;
  for (std::size_t i = 0; i < n; ++i)
    if (coin(rng, p)) s.push_back(i);
  return s;
}

inline IndexSet nonempty_subset(Rng& rng, std::size_t n, double p = 0.5) {
  IndexSet s = subset(rng, n, p);
  if (s.empty()) s.push_back(pick(rng, 0, n - 1));
  return s;
}

/// Spreads `units` grid units over `slots` positions of a length-m row.
inline void scatter_units(Rng& rng, std::vector<double>& row, const IndexSet& slots,
                          std::size_t units, double unit) {
  for (std::size_t u = 0; u < units; ++u) row[slots[pick(rng, 0, slots.size() - 1)]] += unit;
}

/// Spreads `mass` over `slots` with exponential (Dirichlet(1)) proportions;
/// some entries are zeroed when `sparse`.
inline void scatter_mass(Rng& rng, std::vector<double>& row, const IndexSet& slots, double mass,
                         bool sparse) {
  std::vector<double> e(slots.size());
  std::exponential_distribution<double> ex(1.0);
  double total = 0.0;
  for (auto& v : e) {
    v = (sparse && coin(rng, 0.3)) ? 0.0 : ex(rng);
    total += v;
  }
  if (total == 0.0) {
    e[pick(rng, 0, e.size() - 1)] = 1.0;
    total = 1.0;
  }
  for (std::size_t k = 0; k < slots.size(); ++k) row[slots[k]] += mass * e[k] / total;
}

/// Random stochastic row on a grid of 1/units.
inline std::vector<double> grid_row(Rng& rng, std::size_t m, std::size_t units = 10) {
  std::vector<double> row(m, 0.0);
  scatter_units(rng, row, all_indices(m), units, 1.0 / static_cast<double>(units));
  return row;
}

inline std::vector<double> continuous_row(Rng& rng, std::size_t m, bool sparse = true) {
  std::vector<double> row(m, 0.0);
  scatter_mass(rng, row, all_indices(m), 1.0, sparse);
  return row;
}

/// Stochastic row whose mass on `inside` is at least 1/2 (exactly 1/2 allowed when
/// `allow_half`) and otherwise strictly above 1/2.
inline std::vector<double> row_favoring(Rng& rng, std::size_t m, const IndexSet& inside,
                                        bool allow_half, bool grid) {
  std::vector<double> row(m, 0.0);
  IndexSet outside;
  for (std::size_t j = 0; j < m; ++j)
    if (!std::binary_search(inside.begin(), inside.end(), j)) outside.push_back(j);
  if (grid) {
    const std::size_t units = 10;
    std::size_t k = outside.empty() ? units : pick(rng, allow_half ? 5 : 6, units);
    scatter_units(rng, row, inside, k, 0.1);
    if (k < units) scatter_units(rng, row, outside, units - k, 0.1);
  } else {
    const double mass = outside.empty() ? 1.0 : uniform(rng, allow_half ? 0.5 : 0.5000001, 1.0);
    scatter_mass(rng, row, inside, mass, false);
    if (mass < 1.0) scatter_mass(rng, row, outside, 1.0 - mass, false);
  }
  return row;
}

inline Matrix matrix_of_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline Matrix stochastic_matrix(Rng& rng, std::size_t rows, std::size_t cols, bool grid) {
  std::vector<std::vector<double>> r;
  for (std::size_t i = 0; i < rows; ++i)
    r.push_back(grid ? grid_row(rng, cols) : continuous_row(rng, cols));
  return matrix_of_rows(r);
}

inline EnvironmentComplex complex(Rng& rng, std::size_t n, std::size_t l) {
  EnvironmentComplex c;
  c.vertex_count = n;
  for (std::size_t k = 0; k < l; ++k) c.add_uniform(nonempty_subset(rng, n));
  return c;
}

struct ConfigShape {
  std::size_t n_min = 2, n_max = 8;
  std::size_t l_min = 1, l_max = 5;
  double unopinionated_p = 0.3;  // chance an agent gets lambda = 0
  double lambda_floor = 0.0;     // opinionated lambda drawn from (floor, 1]
  bool common_bias = false;
  bool grid_weights = false;
};

inline SystemConfig config(Rng& rng, const ConfigShape& shape = {}) {
  const std::size_t n = pick(rng, shape.n_min, shape.n_max);
  const std::size_t l = pick(rng, shape.l_min, shape.l_max);
  SystemConfig cfg;
  cfg.population.lambda = Vector(static_cast<Eigen::Index>(n));
  cfg.population.gamma = Vector(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    cfg.population.lambda[ii] =
        coin(rng, shape.unopinionated_p)
            ? 0.0
            : shape.lambda_floor + (1.0 - shape.lambda_floor) * unit_open_zero(rng);
    cfg.population.gamma[ii] = uniform(rng, 0.0, 1.0);
  }
  cfg.population.u = shape.common_bias ? Vector::Constant(static_cast<Eigen::Index>(n), uniform(rng, -1.0, 1.0))
                                       : real_vector(rng, n);
  cfg.W = stochastic_matrix(rng, n, n, shape.grid_weights);
  cfg.complex = complex(rng, n, l);
  cfg.M = stochastic_matrix(rng, n, l, shape.grid_weights);
  cfg.x0 = mixed_vector(rng, n);
  return cfg;
}

/// Fully opinionated configuration meeting (1 - lambda_min) gamma_max < lambda_min.
inline SystemConfig contracting_config(Rng& rng, std::size_t n_max = 8) {
  ConfigShape shape;
  shape.n_max = n_max;
  shape.unopinionated_p = 0.0;
  shape.lambda_floor = 0.2;
  for (;;) {
    SystemConfig cfg = config(rng, shape);
    const double lmin = cfg.population.lambda.minCoeff();
    if ((1.0 - lmin) * cfg.population.gamma.maxCoeff() < lmin) return cfg;
    // Shrink gamma towards the admissible region instead of redrawing everything.
    const double cap = lmin / (1.0 - lmin);
    if (cap > 0.0 && std::isfinite(cap)) {
      cfg.population.gamma *= std::min(1.0, 0.999 * cap / cfg.population.gamma.maxCoeff());
      if ((1.0 - lmin) * cfg.population.gamma.maxCoeff() < lmin) return cfg;
    }
  }
}

/// Configuration in which P (returned through `cluster`) is a cohesive influential
/// cluster: P-rows of W keep >= 1/2 inside P, simplex 0 lies in P and every row of
/// M puts more than half its mass on it.
inline SystemConfig cluster_config(Rng& rng, IndexSet& cluster) {
  const std::size_t n = pick(rng, 2, 8);
  const std::size_t l = pick(rng, 1, 5);
  const bool grid = coin(rng);
  cluster = nonempty_subset(rng, n);
  std::vector<std::vector<double>> w;
  for (std::size_t i = 0; i < n; ++i)
    w.push_back(std::binary_search(cluster.begin(), cluster.end(), i)
                    ? row_favoring(rng, n, cluster, true, grid)
                    : (grid ? grid_row(rng, n) : continuous_row(rng, n)));
  SystemConfig cfg;
  cfg.W = matrix_of_rows(w);
  cfg.complex.vertex_count = n;
  IndexSet core;
  for (std::size_t a : cluster)
    if (coin(rng, 0.7)) core.push_back(a);
  if (core.empty()) core.push_back(cluster.front());
  cfg.complex.add_uniform(core);
  for (std::size_t k = 1; k < l; ++k) cfg.complex.add_uniform(nonempty_subset(rng, n));
  std::vector<std::vector<double>> m;
  for (std::size_t i = 0; i < n; ++i) m.push_back(row_favoring(rng, l, {0}, false, grid));
  cfg.M = matrix_of_rows(m);
  cfg.population.lambda = Vector(static_cast<Eigen::Index>(n));
  cfg.population.gamma = Vector(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cfg.population.lambda[static_cast<Eigen::Index>(i)] = coin(rng, 0.4) ? 0.0 : unit_open_zero(rng);
    cfg.population.gamma[static_cast<Eigen::Index>(i)] = uniform(rng, 0.0, 1.0);
  }
  cfg.population.u = real_vector(rng, n);
  cfg.x0 = mixed_vector(rng, n);
  return cfg;
}

/// Configuration satisfying the consensus hypothesis (no cohesive unopinionated
/// set, an all-opinionated weak cohesive group set) with a common bias.
inline SystemConfig hypothesis_config(Rng& rng) {
  for (;;) {
    ConfigShape shape;
    shape.n_min = 3;
    shape.unopinionated_p = 0.4;
    shape.lambda_floor = 0.1;
    shape.common_bias = true;
    SystemConfig cfg = config(rng, shape);
    if (cfg.population.opinionated().empty()) continue;
    // Bias M towards all-opinionated simplices so the hypothesis is not too rare.
    const IndexSet op = simplices_within(cfg.population.opinionated(), cfg.complex);
    if (op.empty()) continue;
    std::vector<std::vector<double>> m;
    for (std::size_t i = 0; i < cfg.n(); ++i)
      m.push_back(row_favoring(rng, cfg.complex.size(), op, false, false));
    cfg.M = matrix_of_rows(m);
    if (check_theorem31(System(cfg)).holds) return cfg;
  }
}

}  // namespace gen

// ---------------------------------------------------------------------------
// Property results

struct PropertyResult {
  PropertyResult() = default;
  explicit PropertyResult(std::string property) : name(std::move(property)) {}

  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  bool informational = false;
  std::string witness;  // first counterexample

  bool ok() const { return informational || failures == 0; }

  void record(bool pass, const std::function<std::string()>& describe) {
    ++trials;
    if (pass) return;
    if (failures++ == 0) witness = describe();
  }
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::size_t cases = 1000;
  std::string mutant;  // "" or "median-off-by-one"
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::size_t cases = 0;
  std::vector<PropertyResult> results;

  bool ok() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok(); });
  }
};

inline constexpr double kCheckSlack = 1e-11;

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class Seq>
std::string fmt_seq(const Seq& v) {
  std::string s = "(";
  bool first = true;
  for (double x : v) {
    s += (first ? "" : ", ") + fmt(x);
    first = false;
  }
  return s + ")";
}

inline std::string fmt_vec(const Vector& v) {
  return fmt_seq(std::vector<double>(v.data(), v.data() + v.size()));
}

inline std::string fmt_ids(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k] + 1);
  return out + "}";
}

inline std::string fmt_matrix(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += (i ? ", " : "");
    s += fmt_vec(m.row(i).transpose());
  }
  return s + "]";
}

inline std::vector<double> row_vec(const Matrix& m, Eigen::Index i) {
  return std::vector<double>(m.data() + i * m.cols(), m.data() + (i + 1) * m.cols());
}

inline double min_over(const Vector& x, const IndexSet& s) {
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t i : s) v = std::min(v, x[static_cast<Eigen::Index>(i)]);
  return v;
}

inline double max_over(const Vector& x, const IndexSet& s) {
  double v = -std::numeric_limits<double>::infinity();
  for (std::size_t i : s) v = std::max(v, x[static_cast<Eigen::Index>(i)]);
  return v;
}

inline gen::Rng property_rng(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ULL;
  return gen::Rng(detail::splitmix64(seed ^ h));
}

/// Median set with every member shifted to the next larger distinct value: a
/// deliberately wrong implementation used to confirm the battery catches errors.
inline std::vector<double> median_set_off_by_one(std::span<const double> values,
                                                 std::span<const double> weights) {
  std::vector<double> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> out;
  for (double v : weighted_median_set(values, weights)) {
    auto it = std::upper_bound(distinct.begin(), distinct.end(), v);
    out.push_back(it == distinct.end() ? v : *it);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Calls f(parts) for every composition of `units` into `m` non-negative parts.
inline void for_each_composition(std::size_t units, std::size_t m,
                                 const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> parts(m, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == m) {
      parts[pos] = left;
      f(parts);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      parts[pos] = k;
      rec(pos + 1, left - k);
    }
  };
  rec(0, static_cast<int>(units));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Median properties

/// weighted_median_set against integer-exact checking of the definition, over
/// every 0.05-grid weight vector of length 1..6, with two value patterns each.
inline PropertyResult check_median_oracle(std::uint64_t seed, const std::string& mutant = "") {
  PropertyResult r{"median-oracle"};
  auto rng = detail::property_rng(seed, r.name);
  constexpr std::size_t kUnits = 20;
  for (std::size_t m = 1; m <= 6; ++m) {
    detail::for_each_composition(kUnits, m, [&](const std::vector<int>& parts) {
      std::vector<double> weights(m);
      for (std::size_t i = 0; i < m; ++i) weights[i] = parts[i] * 0.05;
      for (int pattern = 0; pattern < 2; ++pattern) {
        std::vector<int> ivals(m);
        for (auto& v : ivals) v = std::uniform_int_distribution<int>(0, pattern == 0 ? 3 : 9)(rng);
        std::vector<double> values(ivals.begin(), ivals.end());

        std::vector<double> expected;
        std::vector<int> distinct = ivals;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (int v : distinct) {
          int below = 0, above = 0;
          for (std::size_t i = 0; i < m; ++i) {
            if (ivals[i] < v) below += parts[i];
            if (ivals[i] > v) above += parts[i];
          }
          if (2 * below <= static_cast<int>(kUnits) && 2 * above <= static_cast<int>(kUnits))
            expected.push_back(v);
        }
        const auto got = mutant == "median-off-by-one"
                             ? detail::median_set_off_by_one(values, weights)
                             : weighted_median_set(values, weights);
        r.record(got == expected, [&] {
          return "values " + detail::fmt_seq(values) + " weights " + detail::fmt_seq(weights) +
                 ": got " + detail::fmt_seq(got) + ", expected " + detail::fmt_seq(expected);
        });
      }
    });
  }
  return r;
}

/// Environment medians stay within the range of agent opinions.
inline PropertyResult check_env_median_bounded(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"env-median-bounded"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = gen::pick(rng, 1, 8), l = gen::pick(rng, 1, 6);
    const Matrix A = indicator_matrix(gen::complex(rng, n, l)).matrix();
    const Matrix M = gen::stochastic_matrix(rng, n, l, gen::coin(rng));
    const Vector x = gen::mixed_vector(rng, n);
    const Vector med = env_med_vector(x, A, M, x);
    const double lo = x.minCoeff() - kCheckSlack, hi = x.maxCoeff() + kCheckSlack;
    r.record((med.array() >= lo).all() && (med.array() <= hi).all(), [&] {
      return "x " + detail::fmt_vec(x) + " A " + detail::fmt_matrix(A) + " M " +
             detail::fmt_matrix(M) + " -> " + detail::fmt_vec(med);
    });
  }
  return r;
}

/// A row with more than half its weight on P (at least half when the agent is in
/// P) has its anchored median inside the opinion range of P.
inline PropertyResult check_median_localized(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"median-localized"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = gen::pick(rng, 1, 8);
    const std::size_t i = gen::pick(rng, 0, n - 1);
    const IndexSet P = gen::nonempty_subset(rng, n);
    const bool inside = std::binary_search(P.begin(), P.end(), i);
    const auto row = gen::row_favoring(rng, n, P, inside, gen::coin(rng));
    const Vector x = gen::mixed_vector(rng, n);
    const double med = weighted_median(detail::vec_span(x), row, x[static_cast<Eigen::Index>(i)]);
    r.record(med >= detail::min_over(x, P) && med <= detail::max_over(x, P), [&] {
      return "agent " + std::to_string(i + 1) + " P " + detail::fmt_ids(P) + " row " +
             detail::fmt_seq(row) + " x " + detail::fmt_vec(x) + " -> " + detail::fmt(med);
    });
  }
  return r;
}

/// Continuous weights: ||Med(x;W) - Med(z;W)|| <= ||x - z||.
inline PropertyResult check_median_nonexpansive(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"median-nonexpansive"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = gen::pick(rng, 1, 8);
    const Matrix W = gen::stochastic_matrix(rng, n, n, false);
    const Vector x = gen::real_vector(rng, n), z = gen::real_vector(rng, n);
    const double lhs = inf_norm(med_vector(x, W, x) - med_vector(z, W, z));
    const double rhs = inf_norm(x - z);
    r.record(lhs <= rhs + kCheckSlack, [&] {
      return "W " + detail::fmt_matrix(W) + " x " + detail::fmt_vec(x) + " z " +
             detail::fmt_vec(z) + ": " + detail::fmt(lhs) + " > " + detail::fmt(rhs);
    });
  }
  return r;
}

/// Grid weights and grid opinions, where exact half-weight ties make the median
/// set non-singleton and the anchored choice can jump. Reported, never failed.
inline PropertyResult check_median_nonexpansive_ties(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"median-nonexpansive-ties"};
  r.informational = true;
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = gen::pick(rng, 2, 6);
    const Matrix W = gen::stochastic_matrix(rng, n, n, true);
    const Vector x = gen::integer_vector(rng, n) * 0.5;
    Vector z = x;
    for (auto& v : z) v += gen::uniform(rng, -0.3, 0.3);
    const double lhs = inf_norm(med_vector(x, W, x) - med_vector(z, W, z));
    const double rhs = inf_norm(x - z);
    r.record(lhs <= rhs + kCheckSlack, [&] {
      return "W " + detail::fmt_matrix(W) + " x " + detail::fmt_vec(x) + " z " +
             detail::fmt_vec(z) + ": " + detail::fmt(lhs) + " > " + detail::fmt(rhs);
    });
  }
  return r;
}

/// Non-square M: medians against M agree with medians against the square padded
/// matrix. For n > l the extra columns get zero weight and values below every
/// real entry; for n < l the extra rows are uniform 1/l.
inline PropertyResult check_padded_median_equivalence(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"padded-median-equivalence"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    std::size_t n = gen::pick(rng, 1, 8), l = gen::pick(rng, 1, 8);
    if (n == l) (gen::coin(rng) ? n : l) += 1;
    const Matrix M = gen::stochastic_matrix(rng, n, l, gen::coin(rng));
    const Vector y = gen::mixed_vector(rng, l);
    const Vector anchors = gen::mixed_vector(rng, n);
    bool same = true;
    if (n > l) {
      Matrix Mp = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      Mp.leftCols(static_cast<Eigen::Index>(l)) = M;
      Vector yp = Vector::Constant(static_cast<Eigen::Index>(n), y.minCoeff() - 1.0);
      yp.head(static_cast<Eigen::Index>(l)) = y;
      for (Eigen::Index i = 0; i < M.rows(); ++i)
        same = same && weighted_median_set(detail::vec_span(y), detail::row_span(M, i)) ==
                           weighted_median_set(detail::vec_span(yp), detail::row_span(Mp, i));
      same = same && stacked_medians(y, M, anchors) == stacked_medians(yp, Mp, anchors);
    } else {
      Matrix Mp = Matrix::Constant(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l),
                                   1.0 / static_cast<double>(l));
      Mp.topRows(static_cast<Eigen::Index>(n)) = M;
      Vector ap = Vector::Zero(static_cast<Eigen::Index>(l));
      ap.head(static_cast<Eigen::Index>(n)) = anchors;
      same = stacked_medians(y, M, anchors) ==
             Vector(stacked_medians(y, Mp, ap).head(static_cast<Eigen::Index>(n)));
    }
    r.record(same, [&] {
      return "M " + detail::fmt_matrix(M) + " y " + detail::fmt_vec(y) + " anchors " +
             detail::fmt_vec(anchors);
    });
  }
  return r;
}

/// The literal zero-fill padding (extra values equal to 0) can add 0 to the
/// median set when the real values straddle 0. Reported, never failed.
inline PropertyResult check_padded_median_zero_fill(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"padded-median-zero-fill"};
  r.informational = true;
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t l = gen::pick(rng, 1, 6), n = l + gen::pick(rng, 1, 3);
    const Matrix M = gen::stochastic_matrix(rng, n, l, true);
    const Vector y = gen::integer_vector(rng, l);
    Matrix Mp = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Mp.leftCols(static_cast<Eigen::Index>(l)) = M;
    Vector yp = Vector::Zero(static_cast<Eigen::Index>(n));
    yp.head(static_cast<Eigen::Index>(l)) = y;
    bool same = true;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      same = same && weighted_median_set(detail::vec_span(y), detail::row_span(M, i)) ==
                         weighted_median_set(detail::vec_span(yp), detail::row_span(Mp, i));
    r.record(same, [&] { return "M " + detail::fmt_matrix(M) + " y " + detail::fmt_vec(y); });
  }
  return r;
}

/// ||Med(Ax;M) - Med(Az;M)|| <= ||x - z|| with continuous weights.
inline PropertyResult check_env_median_nonexpansive(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"env-median-nonexpansive"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = gen::pick(rng, 1, 8), l = gen::pick(rng, 1, 6);
    const Matrix A = indicator_matrix(gen::complex(rng, n, l)).matrix();
    const Matrix M = gen::stochastic_matrix(rng, n, l, false);
    const Vector x = gen::real_vector(rng, n), z = gen::real_vector(rng, n);
    const double lhs = inf_norm(env_med_vector(x, A, M, x) - env_med_vector(z, A, M, z));
    const double rhs = inf_norm(x - z);
    r.record(lhs <= rhs + kCheckSlack, [&] {
      return "A " + detail::fmt_matrix(A) + " M " + detail::fmt_matrix(M) + " x " +
             detail::fmt_vec(x) + " z " + detail::fmt_vec(z);
    });
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cluster and envelope properties

/// For agents of a cohesive influential cluster P, E(x)_i lies in P's range.
inline PropertyResult check_cluster_external_range(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"cluster-external-range"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    IndexSet P;
    const System sys(gen::cluster_config(rng, P));
    const bool is_cluster = is_cohesive_influential_cluster(P, sys.W(), sys.complex(), sys.M());
    const Vector x = gen::mixed_vector(rng, sys.n());
    const Vector e = external_opinion(x, sys);
    const double lo = detail::min_over(x, P) - kCheckSlack, hi = detail::max_over(x, P) + kCheckSlack;
    bool inside = true;
    for (std::size_t i : P) inside = inside && e[static_cast<Eigen::Index>(i)] >= lo && e[static_cast<Eigen::Index>(i)] <= hi;
    r.record(is_cluster && inside, [&] {
      return std::string(is_cluster ? "" : "generator produced a non-cluster; ") + "P " +
             detail::fmt_ids(P) + " W " + detail::fmt_matrix(sys.W()) + " M " +
             detail::fmt_matrix(sys.M()) + " x " + detail::fmt_vec(x) + " E " + detail::fmt_vec(e);
    });
  }
  return r;
}

/// Unopinionated members of a cohesive influential cluster stay within the
/// cluster's initial opinion range forever.
inline PropertyResult check_cluster_confinement(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"cluster-confinement"};
  auto rng = detail::property_rng(seed, r.name);
  StopRule rule;
  rule.max_steps = 100;
  for (std::size_t c = 0; c < cases; ++c) {
    IndexSet P;
    SystemConfig cfg = gen::cluster_config(rng, P);
    for (std::size_t i : P) cfg.population.lambda[static_cast<Eigen::Index>(i)] = 0.0;
    const System sys(cfg);
    const Trajectory traj = simulate(sys, rule);
    const double lo = detail::min_over(cfg.x0, P) - kCheckSlack;
    const double hi = detail::max_over(cfg.x0, P) + kCheckSlack;
    std::size_t bad_t = 0;
    bool ok = true;
    for (std::size_t k = 0; k < traj.states.size() && ok; ++k)
      for (std::size_t i : P) {
        const double v = traj.states[k][static_cast<Eigen::Index>(i)];
        if (v < lo || v > hi) {
          ok = false;
          bad_t = traj.times[k];
        }
      }
    r.record(ok, [&] {
      return "P " + detail::fmt_ids(P) + " leaves its range at t=" + std::to_string(bad_t) +
             " x0 " + detail::fmt_vec(cfg.x0);
    });
  }
  return r;
}

namespace detail {

inline Trajectory full_run(const System& sys, const Vector& x0, std::size_t steps) {
  StopRule rule;
  rule.max_steps = steps;
  rule.tol_step = 1e-300;
  rule.hold_steps = steps + 1;  // never stop early
  return simulate(sys, x0, rule);
}

}  // namespace detail

/// With a common bias u >= min x(t) from T on, min x(t) is non-decreasing from T
/// (dually for the maximum).
inline PropertyResult check_envelope_monotone(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"envelope-monotone"};
  auto rng = detail::property_rng(seed, r.name);
  gen::ConfigShape shape;
  shape.common_bias = true;
  for (std::size_t c = 0; c < cases; ++c) {
    const System sys(gen::config(rng, shape));
    const double u = sys.population().u[0];
    const auto traj = detail::full_run(sys, sys.config().x0, 40);
    const auto& h = traj.spread_history;
    // Earliest T after which u stays above the minimum / below the maximum.
    std::size_t t_min = h.size(), t_max = h.size();
    for (std::size_t t = h.size(); t-- > 0 && u >= h[t].min;) t_min = t;
    for (std::size_t t = h.size(); t-- > 0 && u <= h[t].max;) t_max = t;
    bool ok = true;
    std::string where;
    for (std::size_t t = t_min + 1; t < h.size() && ok; ++t)
      if (h[t].min < h[t - 1].min - kCheckSlack) {
        ok = false;
        where = "min decreases at t=" + std::to_string(t);
      }
    for (std::size_t t = t_max + 1; t < h.size() && ok; ++t)
      if (h[t].max > h[t - 1].max + kCheckSlack) {
        ok = false;
        where = "max increases at t=" + std::to_string(t);
      }
    r.record(ok, [&] { return where + " u " + detail::fmt(u) + " x0 " + detail::fmt_vec(sys.config().x0); });
  }
  return r;
}

/// Once u >= max x(T), u >= max x(t) for every later t (dually for the minimum).
inline PropertyResult check_bias_side_absorbing(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"bias-side-absorbing"};
  auto rng = detail::property_rng(seed, r.name);
  gen::ConfigShape shape;
  shape.common_bias = true;
  for (std::size_t c = 0; c < cases; ++c) {
    SystemConfig cfg = gen::config(rng, shape);
    // Push the bias outside the initial range half of the time.
    if (gen::coin(rng))
      cfg.population.u.setConstant(gen::coin(rng) ? cfg.x0.maxCoeff() + gen::uniform(rng, 0, 1)
                                                  : cfg.x0.minCoeff() - gen::uniform(rng, 0, 1));
    const System sys(cfg);
    const double u = cfg.population.u[0];
    const auto& h = detail::full_run(sys, cfg.x0, 40).spread_history;
    bool ok = true;
    std::size_t bad = 0;
    bool above = false, below = false;
    for (std::size_t t = 0; t < h.size() && ok; ++t) {
      if ((above && h[t].max > u + kCheckSlack) || (below && h[t].min < u - kCheckSlack)) {
        ok = false;
        bad = t;
      }
      above = above || u >= h[t].max;
      below = below || u <= h[t].min;
    }
    r.record(ok, [&] {
      return "bias " + detail::fmt(u) + " crossed at t=" + std::to_string(bad) + " x0 " +
             detail::fmt_vec(cfg.x0);
    });
  }
  return r;
}

// ---------------------------------------------------------------------------
// Consensus-hypothesis trajectory bounds

/// Bound factor for the opinionated squeeze: (1 - lambda_min) over V1 when the
/// reference gap is on the far side of u, (1 - lambda_max) otherwise. `lambda_max_factor`
/// forces the stated choice, (1 - lambda_max) for the lower side.
struct SqueezeFactors {
  double lower;  // applied to (min x(T) - u)
  double upper;  // applied to (max x(T) - u)
};

/// Checks, on one recorded trajectory of a common-bias system, the lag window
/// for unopinionated agents and the geometric squeeze for opinionated agents,
/// for every T from which the minimum (maximum) is non-decreasing (non-increasing).
/// The trajectory must record every step.
inline void check_hypothesis_bounds(const System& sys, const Trajectory& traj, PropertyResult& lag,
                                    PropertyResult& squeeze, PropertyResult* lambda_max_squeeze = nullptr) {
  const auto& pop = sys.population();
  const IndexSet v1 = pop.opinionated(), v2 = pop.unopinionated();
  if (v1.empty()) return;
  const double u = pop.u[static_cast<Eigen::Index>(v1.front())];
  const std::size_t n2 = v2.size();
  const auto& xs = traj.states;
  const auto& h = traj.spread_history;
  const std::size_t steps = xs.size();
  if (traj.times.size() != steps || (steps > 0 && traj.times.back() + 1 != steps))
    throw std::invalid_argument("check_hypothesis_bounds: trajectory must record every step");

  double lmin = 1.0, lmax = 0.0;
  for (std::size_t i : v1) {
    lmin = std::min(lmin, pop.lambda[static_cast<Eigen::Index>(i)]);
    lmax = std::max(lmax, pop.lambda[static_cast<Eigen::Index>(i)]);
  }

  // Earliest T from which the minimum never decreases / the maximum never increases.
  std::size_t t_lo = steps - 1, t_hi = steps - 1;
  while (t_lo > 0 && h[t_lo].min >= h[t_lo - 1].min) --t_lo;
  while (t_hi > 0 && h[t_hi].max <= h[t_hi - 1].max) --t_hi;

  auto v1_window = [&](std::size_t from, std::size_t to, bool want_min) {
    double v = want_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (std::size_t s = from; s <= to; ++s)
      v = want_min ? std::min(v, detail::min_over(xs[s], v1)) : std::max(v, detail::max_over(xs[s], v1));
    return v;
  };

  for (int side = 0; side < 2; ++side) {
    const bool lower = side == 0;
    const std::size_t t_start = lower ? t_lo : t_hi;
    for (std::size_t T = t_start; T < steps; ++T) {
      // Lag window for unopinionated agents.
      for (std::size_t t = T + std::max<std::size_t>(n2, 1); t < steps && n2 > 0; ++t) {
        const double ref = v1_window(t - n2, t - 1, lower);
        for (std::size_t i : v2) {
          const double xi = xs[t][static_cast<Eigen::Index>(i)];
          lag.record(lower ? xi >= ref - kCheckSlack : xi <= ref + kCheckSlack, [&] {
            return std::string(lower ? "lower" : "upper") + " lag window: agent " +
                   std::to_string(i + 1) + " at t=" + std::to_string(t) + " (T=" +
                   std::to_string(T) + ") is " + detail::fmt(xi) + ", window bound " + detail::fmt(ref);
          });
        }
      }
      // Geometric squeeze for opinionated agents.
      const double gap = lower ? h[T].min - u : h[T].max - u;
      const bool far_side = lower ? gap <= 0.0 : gap >= 0.0;
      const double base = far_side ? 1.0 - lmin : 1.0 - lmax;
      const double stated = lower ? 1.0 - lmax : 1.0 - lmin;
      for (std::size_t t = T + 1; t < steps; ++t) {
        const auto K = static_cast<double>((t - T - 1) / (n2 + 1) + 1);
        const double bound = std::pow(base, K) * gap;
        const double lambda_max_bound = std::pow(stated, K) * gap;
        for (std::size_t i : v1) {
          const double d = xs[t][static_cast<Eigen::Index>(i)] - u;
          auto describe = [&](double b) {
            return std::string(lower ? "lower" : "upper") + " squeeze: agent " +
                   std::to_string(i + 1) + " at t=" + std::to_string(t) + " (T=" + std::to_string(T) +
                   ", K=" + detail::fmt(K) + ") has x-u=" + detail::fmt(d) + ", bound " + detail::fmt(b);
          };
          squeeze.record(lower ? d >= bound - kCheckSlack : d <= bound + kCheckSlack,
                         [&] { return describe(bound); });
          if (lambda_max_squeeze)
            lambda_max_squeeze->record(lower ? d >= lambda_max_bound - kCheckSlack : d <= lambda_max_bound + kCheckSlack,
                                  [&] { return describe(lambda_max_bound); });
        }
      }
    }
  }
}

struct HypothesisChecks {
  PropertyResult lag{"unopinionated-lag-window"};
  PropertyResult squeeze{"opinionated-geometric-squeeze"};
  PropertyResult lambda_max_squeeze{"opinionated-geometric-squeeze-lambda-max"};
  PropertyResult consensus{"hypothesis-implies-consensus"};
};

/// Runs the lag-window and squeeze checks on the adjusted ten-agent scenario
/// (reference initial opinions plus random restarts) and on random configurations that
/// satisfy the consensus hypothesis; the latter must also reach consensus at u.
inline HypothesisChecks check_hypothesis_suite(std::uint64_t seed, std::size_t cases) {
  HypothesisChecks out;
  out.lambda_max_squeeze.informational = true;
  auto rng = detail::property_rng(seed, "hypothesis-suite");
  const std::size_t restarts = std::max<std::size_t>(1, cases / 100);
  const System hetb(build_scenario("het-b").cfg);
  for (std::size_t r = 0; r < restarts; ++r) {
    const Vector x0 = r == 0 ? hetb.config().x0 : gen::real_vector(rng, hetb.n());
    check_hypothesis_bounds(hetb, detail::full_run(hetb, x0, 120), out.lag, out.squeeze,
                            &out.lambda_max_squeeze);
  }
  const std::size_t configs = std::max<std::size_t>(50, cases / 20);
  StopRule rule;
  rule.max_steps = 20000;
  for (std::size_t c = 0; c < configs; ++c) {
    const System sys(gen::hypothesis_config(rng));
    const double u = sys.population().u[0];
    check_hypothesis_bounds(sys, detail::full_run(sys, sys.config().x0, 60), out.lag, out.squeeze,
                            &out.lambda_max_squeeze);
    const Trajectory traj = simulate(sys, rule);
    const auto env = envelope_of(traj.final_state());
    out.consensus.record(env.spread() < kDefaultConsensusTol &&
                             std::abs(env.min - u) < kDefaultConsensusTol &&
                             std::abs(env.max - u) < kDefaultConsensusTol,
                         [&] {
                           return "bias " + detail::fmt(u) + " final " +
                                  detail::fmt_vec(traj.final_state()) + " after " +
                                  std::to_string(traj.steps()) + " steps";
                         });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contraction and fixed-point properties

/// (1 - lmin) gmax < lmin  <=>  (1 - lmin)(1 + gmax) < 1 on a 0.01 grid.
inline PropertyResult check_contraction_condition_equivalence() {
  PropertyResult r{"contraction-condition-equivalence"};
  for (int a = 1; a <= 100; ++a)
    for (int b = 0; b <= 100; ++b) {
      // Integer form avoids rounding: (100-a) b < 100 a  <=>  (100-a)(100+b) < 10000.
      const bool lhs = (100 - a) * b < 100 * a;
      const bool rhs = (100 - a) * (100 + b) < 10000;
      AgentPopulation pop;
      pop.lambda = Vector::Constant(1, a / 100.0);
      pop.gamma = Vector::Constant(1, b / 100.0);
      pop.u = Vector::Zero(1);
      const auto rep = contraction_check(pop);
      r.record(lhs == rhs && rep.condition_holds == (rep.contraction_factor < 1.0), [&] {
        return "lambda " + detail::fmt(a / 100.0) + " gamma " + detail::fmt(b / 100.0);
      });
    }
  return r;
}

/// ||F(x) - F(z)|| <= (1 - lmin)(1 + gmax) ||x - z|| for contracting systems.
inline PropertyResult check_map_contraction(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"map-contraction"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const System sys(gen::contracting_config(rng));
    const double factor = contraction_check(sys.population()).contraction_factor;
    const Vector x = gen::real_vector(rng, sys.n()), z = gen::real_vector(rng, sys.n());
    const double lhs = inf_norm(step(x, sys) - step(z, sys));
    const double rhs = factor * inf_norm(x - z);
    r.record(lhs <= rhs + kCheckSlack, [&] {
      return "x " + detail::fmt_vec(x) + " z " + detail::fmt_vec(z) + ": " + detail::fmt(lhs) +
             " > " + detail::fmt(rhs);
    });
  }
  return r;
}

/// I - P - QA is strictly diagonally dominant for arbitrary selectors when every
/// lambda is positive, with row margin exactly lambda_i.
inline PropertyResult check_diagonal_dominance(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"diagonal-dominance"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = gen::pick(rng, 1, 8), l = gen::pick(rng, 1, 6);
    const Matrix A = indicator_matrix(gen::complex(rng, n, l)).matrix();
    Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Matrix Q = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
    Vector lambda(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      lambda[i] = gen::unit_open_zero(rng);
      const double g = gen::uniform(rng, 0.0, 1.0);
      P(i, static_cast<Eigen::Index>(gen::pick(rng, 0, n - 1))) = (1 - lambda[i]) * (1 - g);
      Q(i, static_cast<Eigen::Index>(gen::pick(rng, 0, l - 1))) = (1 - lambda[i]) * g;
    }
    const bool dominant = diagonal_dominance_check(P, Q, A);
    const double margin_err = inf_norm(dominance_margins(P, Q, A) - lambda);
    r.record(dominant && margin_err < 1e-12, [&] {
      return "P " + detail::fmt_matrix(P) + " Q " + detail::fmt_matrix(Q) + " A " +
             detail::fmt_matrix(A) + " margin error " + detail::fmt(margin_err);
    });
  }
  return r;
}

struct LimitChecks {
  PropertyResult closed_form{"closed-form-limit"};
  PropertyResult unique{"limit-unique"};
  PropertyResult consensus{"consensus-iff-equal-biases"};
};

/// Closed-form limit against the simulated limit (1e-8) with dominance of the
/// extracted system; agreement of limits from two starts; consensus exactly when
/// the biases coincide.
inline LimitChecks check_limit_suite(std::uint64_t seed, std::size_t cases) {
  LimitChecks out;
  auto rng = detail::property_rng(seed, "limit-suite");
  StopRule rule;
  rule.max_steps = 20000;
  for (std::size_t c = 0; c < cases; ++c) {
    SystemConfig cfg = gen::contracting_config(rng);
    const System sys(cfg);
    const Vector xstar = iterate_to_limit(sys, cfg.x0);
    std::string why;
    bool ok = false;
    try {
      const auto dm = extract_descriptive_matrices(xstar, sys);
      const auto lp = solve_limit_point(sys, dm);
      const double err = inf_norm(lp.x - xstar);
      const bool dom = diagonal_dominance_check(dm.P, dm.Q, sys.A());
      ok = err < 1e-8 && dom;
      why = "error " + detail::fmt(err) + (dom ? "" : ", not dominant");
    } catch (const std::exception& e) {
      why = e.what();
    }
    out.closed_form.record(ok, [&] { return why + " x* " + detail::fmt_vec(xstar); });

    const Vector other = iterate_to_limit(sys, gen::real_vector(rng, sys.n(), -5.0, 5.0));
    out.unique.record(inf_norm(other - xstar) < 1e-8, [&] {
      return "limits " + detail::fmt_vec(xstar) + " and " + detail::fmt_vec(other);
    });

    const bool equal = gen::coin(rng);
    if (equal) cfg.population.u.setConstant(gen::uniform(rng, -1.0, 1.0));
    const System biased(cfg);
    const Trajectory traj = simulate(biased, rule);
    const auto env = envelope_of(traj.final_state());
    const double bias_spread = cfg.population.u.maxCoeff() - cfg.population.u.minCoeff();
    bool consistent;
    if (equal)
      consistent = env.spread() < kDefaultConsensusTol &&
                   std::abs(0.5 * (env.min + env.max) - cfg.population.u[0]) < kDefaultConsensusTol;
    else
      consistent = bias_spread < 1e-3 || env.spread() > kDefaultConsensusTol;
    out.consensus.record(consistent, [&] {
      return "biases " + detail::fmt_vec(cfg.population.u) + " final " +
             detail::fmt_vec(traj.final_state());
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure properties

/// Peeling equals the union of all cohesive subsets (8 agents, 0.1-grid weights).
inline PropertyResult check_peeling_exhaustive(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"peeling-exhaustive"};
  auto rng = detail::property_rng(seed, r.name);
  constexpr std::size_t n = 8;
  for (std::size_t c = 0; c < std::max<std::size_t>(cases, 200); ++c) {
    // Favor self-weight and a random block so cohesive sets actually occur.
    const IndexSet block = gen::nonempty_subset(rng, n);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i)
      rows.push_back(gen::coin(rng) ? gen::row_favoring(rng, n, block, true, true) : gen::grid_row(rng, n));
    const Matrix W = gen::matrix_of_rows(rows);
    const IndexSet S = gen::nonempty_subset(rng, n, 0.8);
    IndexSet brute;
    for (std::uint64_t mask = 1; mask < (1u << S.size()); ++mask) {
      const IndexSet P = detail::mask_to_set(mask, S);
      if (is_cohesive_agent_set(P, W)) {
        IndexSet merged;
        std::set_union(brute.begin(), brute.end(), P.begin(), P.end(), std::back_inserter(merged));
        brute = std::move(merged);
      }
    }
    const IndexSet peeled = maximal_cohesive_subset(S, W);
    r.record(peeled == brute, [&] {
      return "S " + detail::fmt_ids(S) + " W " + detail::fmt_matrix(W) + ": peeled " +
             detail::fmt_ids(peeled) + ", exhaustive " + detail::fmt_ids(brute);
    });
  }
  return r;
}

/// The peeling residue does not depend on the removal order (100 random orders
/// per instance).
inline PropertyResult check_peeling_order_independent(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"peeling-order-independent"};
  auto rng = detail::property_rng(seed, r.name);
  const std::size_t instances = std::max<std::size_t>(1, cases / 10);
  for (std::size_t c = 0; c < instances; ++c) {
    const std::size_t n = gen::pick(rng, 2, 10);
    const IndexSet block = gen::nonempty_subset(rng, n);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i)
      rows.push_back(gen::coin(rng) ? gen::row_favoring(rng, n, block, true, gen::coin(rng))
                                    : gen::continuous_row(rng, n));
    const Matrix W = gen::matrix_of_rows(rows);
    const IndexSet S = gen::nonempty_subset(rng, n, 0.8);
    const IndexSet reference = maximal_cohesive_subset(S, W);
    for (int shuffle = 0; shuffle < 100; ++shuffle) {
      const IndexSet got = maximal_cohesive_subset(S, W, [&](std::span<const std::size_t> cand) {
        return cand[gen::pick(rng, 0, cand.size() - 1)];
      });
      r.record(got == reference, [&] {
        return "S " + detail::fmt_ids(S) + " W " + detail::fmt_matrix(W) + ": " +
               detail::fmt_ids(got) + " vs " + detail::fmt_ids(reference);
      });
    }
  }
  return r;
}

/// Supersets of weak cohesive group sets are weak cohesive.
inline PropertyResult check_weak_cohesion_monotone(std::uint64_t seed, std::size_t cases) {
  PropertyResult r{"weak-cohesion-monotone"};
  auto rng = detail::property_rng(seed, r.name);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = gen::pick(rng, 1, 8), l = gen::pick(rng, 1, 6);
    const Matrix M = gen::stochastic_matrix(rng, n, l, true);
    const IndexSet Q = gen::nonempty_subset(rng, l);
    IndexSet sup = Q;
    for (std::size_t k = 0; k < l; ++k)
      if (gen::coin(rng) && !std::binary_search(Q.begin(), Q.end(), k)) sup.push_back(k);
    std::sort(sup.begin(), sup.end());
    r.record(!is_weak_cohesive_group_set(Q, M) || is_weak_cohesive_group_set(sup, M), [&] {
      return "M " + detail::fmt_matrix(M) + " Q " + detail::fmt_ids(Q) + " superset " + detail::fmt_ids(sup);
    });
  }
  return r;
}

// ---------------------------------------------------------------------------

inline VerifyReport run_verification(const VerifyOptions& opt) {
  VerifyReport rep;
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  const auto s = opt.seed;
  const auto n = opt.cases;
  auto& out = rep.results;
  out.push_back(check_median_oracle(s, opt.mutant));
  out.push_back(check_env_median_bounded(s, n));
  out.push_back(check_median_localized(s, n));
  out.push_back(check_median_nonexpansive(s, n));
  out.push_back(check_median_nonexpansive_ties(s, n));
  out.push_back(check_padded_median_equivalence(s, n));
  out.push_back(check_padded_median_zero_fill(s, n));
  out.push_back(check_env_median_nonexpansive(s, n));
  out.push_back(check_cluster_external_range(s, n));
  out.push_back(check_cluster_confinement(s, n));
  out.push_back(check_envelope_monotone(s, n));
  out.push_back(check_bias_side_absorbing(s, n));
  auto hyp = check_hypothesis_suite(s, n);
  out.push_back(std::move(hyp.lag));
  out.push_back(std::move(hyp.squeeze));
  out.push_back(std::move(hyp.lambda_max_squeeze));
  out.push_back(std::move(hyp.consensus));
  out.push_back(check_contraction_condition_equivalence());
  out.push_back(check_map_contraction(s, n));
  out.push_back(check_diagonal_dominance(s, n));
  auto lim = check_limit_suite(s, n);
  out.push_back(std::move(lim.closed_form));
  out.push_back(std::move(lim.unique));
  out.push_back(std::move(lim.consensus));
  out.push_back(check_weak_cohesion_monotone(s, n));
  out.push_back(check_peeling_exhaustive(s, n));
  out.push_back(check_peeling_order_independent(s, n));
  return rep;
}

/// One line per property; failing properties are followed by their first witness.
inline void print_report(const VerifyReport& rep, std::ostream& os) {
  os << "verify seed=" << rep.seed << " cases=" << rep.cases << "\n";
  std::size_t width = 0;
  for (const auto& r : rep.results) width = std::max(width, r.name.size());
  for (const auto& r : rep.results) {
    const char* tag = r.informational ? "INFO" : (r.ok() ? "PASS" : "FAIL");
    os << tag << "  " << std::left << std::setw(static_cast<int>(width)) << r.name << "  "
       << (r.trials - r.failures) << "/" << r.trials;
    if (r.informational && r.failures) os << "  (" << r.failures << " violations)";
    os << "\n";
    if (r.failures) os << "      witness: " << r.witness << "\n";
  }
  os << (rep.ok() ? "all properties hold" : "property violations found") << "\n";
}

}  // namespace hodyn
