#pragma once

// Data model for weighted-median opinion dynamics on a simplicial environment:
// agent network W, environment complex (rows of A), environment influence M
// and per-agent anchoring / sensitivity / bias.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hodyn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Sorted, duplicate-free 0-based agent (or simplex) indices.
using IndexSet = std::vector<std::size_t>;

inline constexpr double kRowTolerance = 1e-9;
inline constexpr double kNormalizeTolerance = 1e-6;

/// Weight sums within this distance of 1/2 count as exactly 1/2.
inline constexpr double kHalfSlack = 1e-12;

inline bool at_most_half(double s) { return s <= 0.5 + kHalfSlack; }
inline bool at_least_half(double s) { return s >= 0.5 - kHalfSlack; }
inline bool more_than_half(double s) { return s > 0.5 + kHalfSlack; }

inline IndexSet all_indices(std::size_t n) {
  IndexSet out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

inline double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct Simplex {
  IndexSet members;
  std::vector<double> weights;  // one per member, same order

  bool operator==(const Simplex&) const = default;
};

struct EnvironmentComplex {
  std::size_t vertex_count = 0;
  std::vector<Simplex> simplices;

  std::size_t size() const { return simplices.size(); }

  /// Appends a simplex with uniform membership weights 1/|members|.
  EnvironmentComplex& add_uniform(IndexSet members) {
    std::sort(members.begin(), members.end());
    std::vector<double> w(members.size(),
                          members.empty() ? 0.0 : 1.0 / static_cast<double>(members.size()));
    simplices.push_back({std::move(members), std::move(w)});
    return *this;
  }

  bool operator==(const EnvironmentComplex&) const = default;
};

struct AgentPopulation {
  Vector lambda;
  Vector gamma;
  Vector u;

  std::size_t size() const { return static_cast<std::size_t>(lambda.size()); }

  /// V1: agents with lambda > 0.
  IndexSet opinionated() const {
    IndexSet out;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      if (lambda[i] > 0.0) out.push_back(static_cast<std::size_t>(i));
    return out;
  }

  /// V2: agents with lambda == 0.
  IndexSet unopinionated() const {
    IndexSet out;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      if (!(lambda[i] > 0.0)) out.push_back(static_cast<std::size_t>(i));
    return out;
  }

  bool operator==(const AgentPopulation& o) const {
    return lambda == o.lambda && gamma == o.gamma && u == o.u;
  }
};

struct SystemConfig {
  AgentPopulation population;
  Matrix W;
  EnvironmentComplex complex;
  Matrix M;
  Vector x0;

  std::size_t n() const { return population.size(); }

  bool operator==(const SystemConfig& o) const {
    return population == o.population && W == o.W && complex == o.complex && M == o.M &&
           x0 == o.x0;
  }
};

struct Violation {
  std::string code;  // row-sum, negative-entry, dimension, range, non-finite, simplex
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  bool has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
  }

  void add(std::string code, std::string message) {
    violations.push_back({std::move(code), std::move(message)});
  }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& v : violations) os << "[" << v.code << "] " << v.message << "\n";
    return os.str();
  }
};

namespace detail {

inline void check_row_stochastic(const Matrix& m, const std::string& name,
                                 ValidationReport& report) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v)) {
        report.add("non-finite", name + "(" + std::to_string(i + 1) + "," +
                                     std::to_string(j + 1) + ") is not finite");
      } else if (v < 0.0) {
        report.add("negative-entry", name + "(" + std::to_string(i + 1) + "," +
                                         std::to_string(j + 1) + ") is negative");
      }
      sum += v;
    }
    if (std::isfinite(sum) && std::abs(sum - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << name << " row " << i + 1 << " sums to " << sum;
      report.add("row-sum", os.str());
    }
  }
}

inline void check_unit_interval(const Vector& v, const std::string& name,
                                ValidationReport& report) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0 || v[i] > 1.0)
      report.add("range", name + "[" + std::to_string(i + 1) + "] outside [0,1]");
  }
}

inline void check_finite(const Vector& v, const std::string& name, ValidationReport& report) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      report.add("non-finite", name + "[" + std::to_string(i + 1) + "] is not finite");
}

inline void check_length(Eigen::Index actual, std::size_t n, const std::string& name,
                         ValidationReport& report) {
  if (static_cast<std::size_t>(actual) != n)
    report.add("dimension", name + " has length " + std::to_string(actual) + ", expected " +
                                std::to_string(n));
}

}  // namespace detail

inline ValidationReport validate_complex(const EnvironmentComplex& complex) {
  ValidationReport report;
  if (complex.simplices.empty()) report.add("simplex", "environment has no simplices");
  for (std::size_t k = 0; k < complex.size(); ++k) {
    const auto& s = complex.simplices[k];
    const std::string name = "simplex " + std::to_string(k + 1);
    if (s.members.empty()) {
      report.add("simplex", name + " is empty");
      continue;
    }
    if (s.weights.size() != s.members.size()) {
      report.add("dimension", name + " has " + std::to_string(s.weights.size()) +
                                  " weights for " + std::to_string(s.members.size()) +
                                  " members");
      continue;
    }
    IndexSet sorted = s.members;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      report.add("simplex", name + " lists a member twice");
    double sum = 0.0;
    for (std::size_t m = 0; m < s.members.size(); ++m) {
      if (s.members[m] >= complex.vertex_count)
        report.add("simplex", name + " member " + std::to_string(s.members[m] + 1) +
                                  " outside 1.." + std::to_string(complex.vertex_count));
      if (!std::isfinite(s.weights[m]) || !(s.weights[m] > 0.0))
        report.add("simplex", name + " has a non-positive membership weight");
      sum += s.weights[m];
    }
    if (std::isfinite(sum) && std::abs(sum - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << name << " membership weights sum to " << sum;
      report.add("row-sum", os.str());
    }
  }
  return report;
}

/// Lists every violated invariant; empty iff the configuration is usable.
inline ValidationReport validate_config(const SystemConfig& cfg) {
  ValidationReport report;
  const std::size_t n = cfg.n();
  if (n == 0) report.add("dimension", "population is empty");

  detail::check_length(cfg.population.gamma.size(), n, "gamma", report);
  detail::check_length(cfg.population.u.size(), n, "u", report);
  detail::check_length(cfg.x0.size(), n, "x0", report);
  detail::check_unit_interval(cfg.population.lambda, "lambda", report);
  detail::check_unit_interval(cfg.population.gamma, "gamma", report);
  detail::check_finite(cfg.population.u, "u", report);
  detail::check_finite(cfg.x0, "x0", report);

  if (static_cast<std::size_t>(cfg.W.rows()) != n || static_cast<std::size_t>(cfg.W.cols()) != n)
    report.add("dimension", "W is " + std::to_string(cfg.W.rows()) + "x" +
                                std::to_string(cfg.W.cols()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(n));
  detail::check_row_stochastic(cfg.W, "W", report);

  if (cfg.complex.vertex_count != n)
    report.add("dimension", "environment is defined over " +
                                std::to_string(cfg.complex.vertex_count) + " agents, expected " +
                                std::to_string(n));
  for (auto& v : validate_complex(cfg.complex).violations) report.violations.push_back(v);

  const std::size_t l = cfg.complex.size();
  if (static_cast<std::size_t>(cfg.M.rows()) != n || static_cast<std::size_t>(cfg.M.cols()) != l)
    report.add("dimension", "M is " + std::to_string(cfg.M.rows()) + "x" +
                                std::to_string(cfg.M.cols()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(l));
  detail::check_row_stochastic(cfg.M, "M", report);
  return report;
}

/// Nonnegative matrix whose rows sum to 1 within kRowTolerance.
class RowStochasticMatrix {
 public:
  explicit RowStochasticMatrix(Matrix m) : m_(std::move(m)) {
    ValidationReport report;
    detail::check_row_stochastic(m_, "matrix", report);
    if (!report.ok()) throw std::invalid_argument("not row-stochastic: " + report.summary());
  }

  const Matrix& matrix() const { return m_; }
  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// A (l x n): a_ki is the membership weight of agent i in simplex k, else 0.
inline RowStochasticMatrix indicator_matrix(const EnvironmentComplex& complex) {
  const auto report = validate_complex(complex);
  if (!report.ok()) throw std::invalid_argument("invalid environment: " + report.summary());
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(complex.size()),
                          static_cast<Eigen::Index>(complex.vertex_count));
  for (std::size_t k = 0; k < complex.size(); ++k) {
    const auto& s = complex.simplices[k];
    for (std::size_t m = 0; m < s.members.size(); ++m)
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s.members[m])) = s.weights[m];
  }
  return RowStochasticMatrix(std::move(a));
}

/// y = A x.
inline Vector environment_opinion(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size())
    throw std::invalid_argument("environment_opinion: A has " + std::to_string(a.cols()) +
                                " columns but x has " + std::to_string(x.size()) + " entries");
  return a * x;
}

inline Vector environment_opinion(const RowStochasticMatrix& a, const Vector& x) {
  return environment_opinion(a.matrix(), x);
}

/// Rescales W, M rows and simplex weights whose sums are within kNormalizeTolerance of 1.
/// Rows further off are left untouched and reported.
inline ValidationReport normalize_rows(SystemConfig& cfg) {
  ValidationReport report;
  auto fix = [&](Matrix& m, const std::string& name) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double s = m.row(i).sum();
      if (std::abs(s - 1.0) <= kNormalizeTolerance && s > 0.0)
        m.row(i) /= s;
      else if (std::abs(s - 1.0) > kRowTolerance)
        report.add("row-sum", name + " row " + std::to_string(i + 1) + " is not normalizable");
    }
  };
  fix(cfg.W, "W");
  fix(cfg.M, "M");
  for (std::size_t k = 0; k < cfg.complex.size(); ++k) {
    auto& w = cfg.complex.simplices[k].weights;
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(s - 1.0) <= kNormalizeTolerance && s > 0.0)
      for (auto& v : w) v /= s;
    else if (std::abs(s - 1.0) > kRowTolerance)
      report.add("row-sum", "simplex " + std::to_string(k + 1) + " is not normalizable");
  }
  return report;
}

class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(ValidationReport report)
      : std::invalid_argument("invalid configuration:\n" + report.summary()),
        report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// A validated configuration together with its derived indicator matrix.
class System {
 public:
  explicit System(SystemConfig cfg) : cfg_(std::move(cfg)) {
    auto report = validate_config(cfg_);
    if (!report.ok()) throw InvalidConfig(std::move(report));
    a_ = indicator_matrix(cfg_.complex).matrix();
  }

  const SystemConfig& config() const { return cfg_; }
  const AgentPopulation& population() const { return cfg_.population; }
  const Matrix& W() const { return cfg_.W; }
  const Matrix& M() const { return cfg_.M; }
  const Matrix& A() const { return a_; }
  const EnvironmentComplex& complex() const { return cfg_.complex; }
  std::size_t n() const { return cfg_.n(); }
  std::size_t l() const { return cfg_.complex.size(); }

 private:
  SystemConfig cfg_;
  Matrix a_;
};

}  // namespace hodyn
