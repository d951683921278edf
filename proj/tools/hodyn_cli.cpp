// hodyn: command-line front end.
//
// Exit codes: 0 success, 1 failed verification or unmet expectation,
// 2 invalid configuration or usage, 3 file I/O failure.

#include "hodyn/dynamics.hpp"
#include "hodyn/fixedpoint.hpp"
#include "hodyn/io.hpp"
#include "hodyn/model.hpp"
#include "hodyn/scenarios.hpp"
#include "hodyn/structures.hpp"
#include "hodyn/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace hodyn;

namespace {

enum Exit : int { kOk = 0, kFailed = 1, kInvalid = 2, kIo = 3 };

/// Thrown to unwind a command with a specific exit code after reporting.
struct CommandExit {
  int code;
};

struct Source {
  std::string config_path;
  std::string scenario;
  std::uint64_t seed = kDefaultScenarioSeed;
  bool normalize = false;
  std::string save_config;

  void attach(CLI::App* cmd) {
    auto* c = cmd->add_option("--config", config_path, "Configuration JSON file");
    auto* s = cmd->add_option("--scenario", scenario, "Built-in scenario name")
                  ->check(CLI::IsMember(scenario_names()));
    c->excludes(s);
    cmd->add_option("--seed", seed, "Seed for scenario sampling")->capture_default_str();
    cmd->add_flag("--normalize", normalize,
                  "Rescale W/M rows and simplex weights that are within 1e-6 of summing to 1");
    cmd->add_option("--save-config", save_config, "Write the resolved configuration as JSON");
  }

  SystemConfig load() const {
    SystemConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (!scenario.empty()) {
      cfg = build_scenario(scenario, seed).cfg;
    } else {
      std::cerr << "error: one of --config or --scenario is required\n";
      throw CommandExit{kInvalid};
    }
    if (normalize) {
      const auto rep = normalize_rows(cfg);
      if (!rep.ok()) std::cerr << "normalization left rows unchanged:\n" << rep.summary() << "\n";
    }
    if (!save_config.empty()) save_config_file(cfg);
    return cfg;
  }

  System system() const {
    SystemConfig cfg = load();
    const auto rep = validate_config(cfg);
    if (!rep.ok()) {
      std::cerr << "invalid configuration:\n" << rep.summary() << "\n";
      throw CommandExit{kInvalid};
    }
    return System(std::move(cfg));
  }

 private:
  void save_config_file(const SystemConfig& cfg) const { hodyn::save_config(cfg, save_config); }
};

struct RunOptions {
  std::size_t steps = StopRule{}.max_steps;
  double tol = StopRule{}.tol_step;
  std::size_t hold = StopRule{}.hold_steps;
  std::size_t stride = 1;
  double consensus_tol = kDefaultConsensusTol;

  void attach(CLI::App* cmd) {
    cmd->add_option("--steps", steps, "Maximum number of steps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tol", tol, "Step tolerance for convergence (sup norm)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--hold", hold, "Consecutive small steps required")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--stride", stride, "Record every N-th state")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--consensus-tol", consensus_tol, "Final spread counted as consensus")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  StopRule rule() const { return {steps, tol, hold, stride}; }
};

void write_outputs(const fs::path& dir, const Trajectory& traj, const json& meta) {
  save_trajectory(traj, dir / "trajectory.csv");
  save_report(meta, dir / "metadata.json");
}

int cmd_simulate(const Source& src, const RunOptions& run, const std::string& out) {
  const System sys = src.system();
  const Trajectory traj = simulate(sys, run.rule());
  json meta = trajectory_metadata(traj, run.consensus_tol);
  if (!src.scenario.empty()) {
    meta["scenario"] = src.scenario;
    meta["seed"] = src.seed;
  }
  if (!out.empty()) write_outputs(out, traj, meta);
  std::cout << meta.dump(2) << "\n";
  return kOk;
}

int cmd_analyze(const Source& src, const std::string& out) {
  const System sys = src.system();
  const json report = structure_report_json(analyze_structure(sys));
  if (!out.empty()) save_report(report, fs::path(out) / "analysis.json");
  std::cout << report.dump(2) << "\n";
  return kOk;
}

int cmd_fixed_point(const Source& src, double tol, const std::string& out) {
  const System sys = src.system();
  ContractionReport contraction;
  try {
    contraction = contraction_check(sys.population());
  } catch (const TheoremScopeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  json report;
  report["contraction"] = contraction_json(contraction);
  int code = kOk;
  if (!contraction.condition_holds) {
    report["error"] = "contraction condition does not hold; the limit is not guaranteed";
    code = kFailed;
  } else {
    const Vector simulated = iterate_to_limit(sys, sys.config().x0, tol);
    report["simulatedLimit"] = vector_json(simulated);
    try {
      const auto dm = extract_descriptive_matrices(simulated, sys);
      const auto lp = solve_limit_point(sys, dm);
      report["closedFormLimit"] = vector_json(lp.x);
      report["solveResidual"] = lp.residual;
      report["limitDifference"] = inf_norm(lp.x - simulated);
      report["agentSelectors"] = ids_json(dm.k);
      report["simplexSelectors"] = ids_json(dm.l);
      report["diagonallyDominant"] = diagonal_dominance_check(dm.P, dm.Q, sys.A());
      report["dominanceMargins"] = vector_json(dominance_margins(dm.P, dm.Q, sys.A()));
      if (!(inf_norm(lp.x - simulated) < kReconstructionTol)) code = kFailed;
    } catch (const std::runtime_error& e) {
      report["error"] = e.what();
      code = kFailed;
    }
  }
  if (!out.empty()) save_report(report, fs::path(out) / "fixed_point.json");
  std::cout << report.dump(2) << "\n";
  return code;
}

int cmd_scenario(const std::string& name, std::uint64_t seed, const RunOptions& run,
                 std::size_t repetitions, double x0_low, double x0_high, const std::string& out) {
  const Scenario s = build_scenario(name, seed);
  if (name == "appendix-l") {
    RepeatOptions opt;
    opt.x0_low = x0_low;
    opt.x0_high = x0_high;
    opt.rule = run.rule();
    opt.consensus_tol = run.consensus_tol;
    const RepeatReport rep = run_repeat_experiment(s, repetitions, seed, opt);
    const json j = repeat_report_json(rep);
    if (!out.empty()) save_report(j, fs::path(out) / "repeat.json");
    std::cout << j.dump(2) << "\n";
    return rep.failed == 0 ? kOk : kFailed;
  }
  const System sys(s.cfg);
  const Trajectory traj = simulate(sys, run.rule());
  const auto failures = check_expectations(s, traj, run.consensus_tol);
  json meta = trajectory_metadata(traj, run.consensus_tol);
  meta["scenario"] = name;
  meta["seed"] = seed;
  meta["clusters"] = json::array();
  for (const auto& c : opinion_clusters(traj.final_state(), 10.0 * run.consensus_tol))
    meta["clusters"].push_back(ids_json(c));
  meta["expectationFailures"] = failures;
  meta["expectationsMet"] = failures.empty();
  if (!out.empty()) write_outputs(out, traj, meta);
  std::cout << meta.dump(2) << "\n";
  return failures.empty() ? kOk : kFailed;
}

int cmd_verify(std::uint64_t seed, std::size_t cases, const std::string& mutant) {
  VerifyOptions opt;
  opt.seed = seed;
  opt.cases = cases;
  opt.mutant = mutant;
  const VerifyReport rep = run_verification(opt);
  print_report(rep, std::cout);
  return rep.ok() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-median opinion dynamics on simplicial complexes"};
  app.require_subcommand(1);

  Source src_sim, src_an, src_fp;
  RunOptions run_sim, run_sc;
  std::string out_sim, out_an, out_fp, out_sc;

  auto* sim = app.add_subcommand("simulate", "Run the dynamics; writes trajectory.csv and metadata.json");
  src_sim.attach(sim);
  run_sim.attach(sim);
  sim->add_option("--out", out_sim, "Output directory");

  auto* an = app.add_subcommand("analyze", "Report cohesive structures and the consensus hypothesis");
  src_an.attach(an);
  an->add_option("--out", out_an, "Output directory (writes analysis.json)");

  double fp_tol = 1e-12;
  auto* fp = app.add_subcommand("fixed-point", "Contraction check and closed-form limit point");
  src_fp.attach(fp);
  fp->add_option("--tol", fp_tol, "Step tolerance for the simulated limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fp->add_option("--out", out_fp, "Output directory (writes fixed_point.json)");

  std::string sc_name;
  std::uint64_t sc_seed = kDefaultScenarioSeed;
  std::size_t repetitions = 30;
  double x0_low = RepeatOptions{}.x0_low, x0_high = RepeatOptions{}.x0_high;
  auto* sc = app.add_subcommand("scenario", "Run a built-in scenario and check its expectations");
  sc->add_option("name", sc_name, "Scenario name")->required()->check(CLI::IsMember(scenario_names()));
  sc->add_option("--seed", sc_seed, "Sampling seed")->capture_default_str();
  run_sc.attach(sc);
  sc->add_option("--repetitions", repetitions, "Repetitions for appendix-l")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sc->add_option("--x0-low", x0_low, "Lower end of resampled initial opinions")->capture_default_str();
  sc->add_option("--x0-high", x0_high, "Upper end of resampled initial opinions")->capture_default_str();
  sc->add_option("--out", out_sc, "Output directory");

  std::uint64_t v_seed = 1;
  std::size_t v_cases = 1000;
  std::string mutant;
  auto* ver = app.add_subcommand("verify", "Run the randomized property battery");
  ver->add_option("--seed", v_seed, "Seed")->capture_default_str();
  ver->add_option("--cases", v_cases, "Trials per property")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ver->add_option("--inject-mutant", mutant, "Deliberately broken component, to test the battery")
      ->check(CLI::IsMember({"median-off-by-one"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*sim) return cmd_simulate(src_sim, run_sim, out_sim);
    if (*an) return cmd_analyze(src_an, out_an);
    if (*fp) return cmd_fixed_point(src_fp, fp_tol, out_fp);
    if (*sc) {
      if (x0_high < x0_low) {
        std::cerr << "error: --x0-high is below --x0-low\n";
        return kInvalid;
      }
      return cmd_scenario(sc_name, sc_seed, run_sc, repetitions, x0_low, x0_high, out_sc);
    }
    if (*ver) return cmd_verify(v_seed, v_cases, mutant);
  } catch (const CommandExit& e) {
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidConfig& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kInvalid;
}
