#pragma once

// Contraction analysis for fully opinionated systems: the contraction factor,
// the geometric rate bound, the descriptive matrices P and Q realized at the
// fixed point, and the closed-form limit x* = (I - P - QA)^{-1} Lambda u.

#include "hodyn/dynamics.hpp"
#include "hodyn/median.hpp"
#include "hodyn/model.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hodyn {

struct ContractionReport {
  double lambda_min = 0.0;
  double gamma_max = 0.0;
  bool condition_holds = false;
  double contraction_factor = 0.0;  // (1 - lambda_min)(1 + gamma_max)
};

class TheoremScopeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline ContractionReport contraction_check(const AgentPopulation& pop) {
  if (pop.size() == 0) throw std::invalid_argument("contraction_check: empty population");
  for (Eigen::Index i = 0; i < pop.lambda.size(); ++i)
    if (!(pop.lambda[i] > 0.0))
      throw TheoremScopeError("agent " + std::to_string(i + 1) +
                              " is unopinionated; the contraction analysis needs lambda > 0");
  ContractionReport r;
  r.lambda_min = pop.lambda.minCoeff();
  r.gamma_max = pop.gamma.maxCoeff();
  r.condition_holds = (1.0 - r.lambda_min) * r.gamma_max < r.lambda_min;
  r.contraction_factor = (1.0 - r.lambda_min) * (1.0 + r.gamma_max);
  return r;
}

/// factor^(t+1) * ||x0 - x*||_inf, the bound on ||x(t) - x*||_inf.
inline double rate_bound(std::size_t t, const Vector& x0, const Vector& xstar,
                         const ContractionReport& report) {
  if (!report.condition_holds)
    throw std::domain_error("rate_bound: contraction condition does not hold");
  return std::pow(report.contraction_factor, static_cast<double>(t + 1)) * inf_norm(x0 - xstar);
}

/// Iterates the update to its limit: five consecutive increments below `tol`,
/// then up to `polish` further steps until the state repeats exactly.
inline Vector iterate_to_limit(const System& sys, const Vector& x0, double tol = 1e-12,
                               std::size_t max_steps = 200000, std::size_t polish = 2000) {
  Vector x = x0;
  std::size_t run = 0;
  for (std::size_t t = 0; t < max_steps && run < 5; ++t) {
    Vector next = step(x, sys);
    run = inf_norm(next - x) < tol ? run + 1 : 0;
    x = std::move(next);
  }
  if (run < 5) throw std::runtime_error("iterate_to_limit: no convergence within step budget");
  for (std::size_t k = 0; k < polish; ++k) {
    Vector next = step(x, sys);
    if (next == x) break;
    x = std::move(next);
  }
  return x;
}

struct DescriptiveMatrices {
  Matrix P;  // n x n, row i non-zero only at k_i
  Matrix Q;  // n x l, row i non-zero only at l_i
  std::vector<std::size_t> k;
  std::vector<std::size_t> l;
};

class NotFixedPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kFixedPointTol = 1e-9;
inline constexpr double kSelectorTol = 1e-12;
inline constexpr double kReconstructionTol = 1e-8;

/// Reads off, at a fixed state, which agent and which simplex realize each
/// agent's medians, and builds P and Q from them (smallest index on ties).
inline DescriptiveMatrices extract_descriptive_matrices(const Vector& xstar, const System& sys) {
  const std::size_t n = sys.n();
  if (static_cast<std::size_t>(xstar.size()) != n)
    throw std::invalid_argument("extract_descriptive_matrices: wrong dimension");
  const double drift = inf_norm(step(xstar, sys) - xstar);
  if (!(drift <= kFixedPointTol)) {
    std::ostringstream os;
    os << "state is not fixed: ||step(x) - x|| = " << drift;
    throw NotFixedPoint(os.str());
  }

  const auto& pop = sys.population();
  const Vector y = environment_opinion(sys.A(), xstar);
  const Vector agent_med = med_vector(xstar, sys.W(), xstar);
  const Vector env_med = stacked_medians(y, sys.M(), xstar);

  auto first_match = [](const Vector& v, double target) -> std::optional<std::size_t> {
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (std::abs(v[j] - target) <= kSelectorTol) return static_cast<std::size_t>(j);
    return std::nullopt;
  };

  DescriptiveMatrices dm;
  dm.P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  dm.Q = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sys.l()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto ki = first_match(xstar, agent_med[ii]);
    const auto li = first_match(y, env_med[ii]);
    if (!ki || !li)
      throw std::runtime_error("extract_descriptive_matrices: no component matches the median of agent " +
                               std::to_string(i + 1));
    dm.k.push_back(*ki);
    dm.l.push_back(*li);
    const double keep = 1.0 - pop.lambda[ii];
    dm.P(ii, static_cast<Eigen::Index>(*ki)) = keep * (1.0 - pop.gamma[ii]);
    dm.Q(ii, static_cast<Eigen::Index>(*li)) = keep * pop.gamma[ii];
  }

  const Vector lam_u = pop.lambda.cwiseProduct(pop.u);
  const double residual = inf_norm(lam_u + dm.P * xstar + dm.Q * (sys.A() * xstar) - xstar);
  if (!(residual < kReconstructionTol)) {
    std::ostringstream os;
    os << "reconstruction residual " << residual << " exceeds " << kReconstructionTol;
    throw NotFixedPoint(os.str());
  }
  return dm;
}

/// I - P - QA.
inline Matrix limit_system_matrix(const DescriptiveMatrices& dm, const Matrix& A) {
  const Eigen::Index n = dm.P.rows();
  return Matrix::Identity(n, n) - dm.P - dm.Q * A;
}

/// Per-row |diag| - sum |off-diag| of I - P - QA.
inline Vector dominance_margins(const Matrix& P, const Matrix& Q, const Matrix& A) {
  const Matrix T = Matrix::Identity(P.rows(), P.cols()) - P - Q * A;
  Vector margin(T.rows());
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    const double diag = std::abs(T(i, i));
    margin[i] = diag - (T.row(i).cwiseAbs().sum() - diag);
  }
  return margin;
}

/// Strict row diagonal dominance of I - P - QA.
inline bool diagonal_dominance_check(const Matrix& P, const Matrix& Q, const Matrix& A) {
  if (P.rows() != P.cols() || Q.rows() != P.rows() || Q.cols() != A.rows() ||
      A.cols() != P.cols())
    throw std::invalid_argument("diagonal_dominance_check: inconsistent shapes");
  const Vector m = dominance_margins(P, Q, A);
  return (m.array() > 0.0).all();
}

class SingularLimitSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LimitPoint {
  Vector x;
  double residual = 0.0;  // ||(I - P - QA) x - Lambda u||_inf
};

/// Solves (I - P - QA) x = Lambda u by a dense pivoted LU.
inline LimitPoint solve_limit_point(const System& sys, const DescriptiveMatrices& dm) {
  const Matrix T = limit_system_matrix(dm, sys.A());
  const auto& pop = sys.population();
  const Vector rhs = pop.lambda.cwiseProduct(pop.u);
  Eigen::FullPivLU<Matrix> lu(T);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "I - P - QA is singular:\n" << T;
    throw SingularLimitSystem(os.str());
  }
  LimitPoint lp;
  lp.x = lu.solve(rhs);
  lp.residual = inf_norm(T * lp.x - rhs);
  if (!(lp.residual < kReconstructionTol)) {
    std::ostringstream os;
    os << "limit solve residual " << lp.residual << " too large for\n" << T;
    throw SingularLimitSystem(os.str());
  }
  return lp;
}

/// Closed-form limit: converge by simulation, read off P and Q, then solve.
inline LimitPoint limit_point_closed_form(const System& sys) {
  const auto report = contraction_check(sys.population());
  if (!report.condition_holds)
    throw std::domain_error("limit_point_closed_form: contraction condition does not hold");
  const Vector xstar = iterate_to_limit(sys, sys.config().x0);
  return solve_limit_point(sys, extract_descriptive_matrices(xstar, sys));
}

}  // namespace hodyn
