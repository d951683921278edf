#pragma once

// File formats:
//   config JSON   {n, lambda[], gamma[], u[], W[][], simplices[{members[], weights[]?}], M[][], x0[]}
//                 agent ids are 1-based in files and 0-based in memory
//   trajectory    CSV "t,x_1,...,x_n", 17 significant digits
//   reports       JSON (trajectory metadata, structure analysis, repeat experiment)

#include "hodyn/dynamics.hpp"
#include "hodyn/fixedpoint.hpp"
#include "hodyn/model.hpp"
#include "hodyn/scenarios.hpp"
#include "hodyn/structures.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hodyn {

using json = nlohmann::json;

/// Malformed or mistyped configuration input; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return obj.at(key);
}

inline double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("field '" + path + "': expected a number");
  return v.get<double>();
}

inline Vector vector_at(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("field '" + path + "': expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = number_at(v[i], path + "[" + std::to_string(i + 1) + "]");
  return out;
}

/// Dense row-major matrix; ragged rows are a parse error, shape checks are left
/// to validation.
inline Matrix matrix_at(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("field '" + path + "': expected an array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = v[i];
    const std::string rp = path + "[" + std::to_string(i + 1) + "]";
    if (!row.is_array()) throw ConfigError("field '" + rp + "': expected an array of numbers");
    if (i == 0) cols = row.size();
    if (row.size() != cols)
      throw ConfigError("field '" + rp + "': row has " + std::to_string(row.size()) +
                        " entries, previous rows have " + std::to_string(cols));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number_at(
          v[i][j], path + "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
  return m;
}

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// 1-based sorted id array.
inline json ids_json(const IndexSet& s) {
  json a = json::array();
  for (std::size_t i : s) a.push_back(i + 1);
  return a;
}

inline SystemConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  SystemConfig cfg;
  const auto& n_field = detail::field(j, "n");
  if (!n_field.is_number_integer() || n_field.get<long long>() < 0)
    throw ConfigError("field 'n': expected a non-negative integer");
  const auto n = n_field.get<std::size_t>();

  cfg.population.lambda = detail::vector_at(detail::field(j, "lambda"), "lambda");
  cfg.population.gamma = detail::vector_at(detail::field(j, "gamma"), "gamma");
  cfg.population.u = detail::vector_at(detail::field(j, "u"), "u");
  cfg.W = detail::matrix_at(detail::field(j, "W"), "W");
  cfg.M = detail::matrix_at(detail::field(j, "M"), "M");
  cfg.x0 = detail::vector_at(detail::field(j, "x0"), "x0");

  const auto& simplices = detail::field(j, "simplices");
  if (!simplices.is_array()) throw ConfigError("field 'simplices': expected an array");
  cfg.complex.vertex_count = n;
  for (std::size_t k = 0; k < simplices.size(); ++k) {
    const std::string path = "simplices[" + std::to_string(k + 1) + "]";
    const auto& s = simplices[k];
    if (!s.is_object() || !s.contains("members"))
      throw ConfigError("field '" + path + "': expected an object with 'members'");
    const auto& mem = s.at("members");
    if (!mem.is_array()) throw ConfigError("field '" + path + ".members': expected an array");
    Simplex simplex;
    for (std::size_t m = 0; m < mem.size(); ++m) {
      const auto& id = mem[m];
      if (!id.is_number_integer() || id.get<long long>() < 1)
        throw ConfigError("field '" + path + ".members[" + std::to_string(m + 1) +
                          "]': expected a 1-based agent id");
      simplex.members.push_back(id.get<std::size_t>() - 1);
    }
    if (s.contains("weights") && !s.at("weights").is_null()) {
      const Vector w = detail::vector_at(s.at("weights"), path + ".weights");
      simplex.weights.assign(w.data(), w.data() + w.size());
    } else {
      simplex.weights.assign(simplex.members.size(),
                             simplex.members.empty() ? 0.0 : 1.0 / static_cast<double>(simplex.members.size()));
    }
    cfg.complex.simplices.push_back(std::move(simplex));
  }
  return cfg;
}

inline json config_to_json(const SystemConfig& cfg) {
  json j;
  j["n"] = cfg.n();
  j["lambda"] = detail::to_json(cfg.population.lambda);
  j["gamma"] = detail::to_json(cfg.population.gamma);
  j["u"] = detail::to_json(cfg.population.u);
  j["W"] = detail::to_json(cfg.W);
  json simplices = json::array();
  for (const auto& s : cfg.complex.simplices)
    simplices.push_back({{"members", ids_json(s.members)}, {"weights", s.weights}});
  j["simplices"] = std::move(simplices);
  j["M"] = detail::to_json(cfg.M);
  j["x0"] = detail::to_json(cfg.x0);
  return j;
}

inline SystemConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON at " + detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0) +
                      ": " + e.what());
  }
  return config_from_json(j);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline SystemConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path));
}

inline void save_config(const SystemConfig& cfg, const std::filesystem::path& path) {
  write_text(path, config_to_json(cfg).dump(2) + "\n");
}

inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  const auto n = traj.states.empty() ? 0 : traj.states.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x_" << i + 1;
  os << "\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < traj.states.size(); ++r) {
    os << traj.times[r];
    for (Eigen::Index i = 0; i < n; ++i) os << "," << traj.states[r][i];
    os << "\n";
  }
}

inline void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  write_text(path, os.str());
}

inline json trajectory_metadata(const Trajectory& traj, double consensus_tol) {
  json j;
  j["converged"] = traj.converged;
  j["convergenceStep"] = traj.convergence_step ? json(*traj.convergence_step) : json(nullptr);
  j["steps"] = traj.steps();
  const auto env = envelope_of(traj.final_state());
  j["finalMin"] = env.min;
  j["finalMax"] = env.max;
  j["finalSpread"] = env.spread();
  j["consensusTolerance"] = consensus_tol;
  const auto c = detect_consensus(traj, consensus_tol);
  j["consensus"] = c ? json(*c) : json(nullptr);
  return j;
}

inline json structure_report_json(const StructureReport& r) {
  json j;
  j["opinionated"] = ids_json(r.opinionated);
  j["unopinionated"] = ids_json(r.unopinionated);
  j["maximalCohesiveSet"] = ids_json(r.maximal_cohesive_set);
  j["maximalCohesiveUnopinionated"] = ids_json(r.maximal_cohesive_unopinionated);
  json weak = json::array();
  for (const auto& q : r.weak_cohesive_group_sets) weak.push_back(ids_json(q));
  j["weakCohesiveGroupSets"] = std::move(weak);
  json strong = json::array();
  for (const auto& e : r.strong_cohesive_group_sets)
    strong.push_back({{"simplices", ids_json(e.witness)}, {"agents", ids_json(e.agents)}});
  j["strongCohesiveGroupSets"] = std::move(strong);
  json clusters = json::array();
  for (const auto& p : r.cohesive_influential_clusters) clusters.push_back(ids_json(p));
  j["cohesiveInfluentialClusters"] = std::move(clusters);
  j["theorem31Satisfied"] = r.theorem31.holds;
  j["theorem31Reasons"] = r.theorem31.reasons;
  j["opinionatedWeakCohesiveWitness"] =
      r.theorem31.weak_witness ? ids_json(*r.theorem31.weak_witness) : json(nullptr);
  j["exact"] = r.exact;
  return j;
}

inline json repeat_report_json(const RepeatReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["repetitions"] = r.repetitions;
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  json runs = json::array();
  for (const auto& run : r.runs) {
    runs.push_back({
        {"index", run.index},
        {"seed", run.seed},
        {"x0", detail::to_json(run.x0)},
        {"converged", run.converged},
        {"convergenceStep", run.convergence_step ? json(*run.convergence_step) : json(nullptr)},
        {"finalSpread", run.final_spread},
        {"consensus", run.consensus ? json(*run.consensus) : json(nullptr)},
        {"passed", run.passed},
    });
  }
  j["runs"] = std::move(runs);
  return j;
}

inline json contraction_json(const ContractionReport& r) {
  return {{"lambdaMin", r.lambda_min},
          {"gammaMax", r.gamma_max},
          {"conditionHolds", r.condition_holds},
          {"contractionFactor", r.contraction_factor}};
}

inline json vector_json(const Vector& v) { return detail::to_json(v); }
inline json matrix_json(const Matrix& m) { return detail::to_json(m); }

inline void save_report(const json& report, const std::filesystem::path& path) {
  write_text(path, report.dump(2) + "\n");
}

}  // namespace hodyn
