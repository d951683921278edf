#include "hodyn/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace hodyn;

namespace {

json tiny() {
  return json::parse(R"({
    "n": 2, "lambda": [0.5, 0.0], "gamma": [0.2, 1.0], "u": [1.0, 0.0],
    "W": [[0.5, 0.5], [0.0, 1.0]],
    "simplices": [{"members": [1, 2]}],
    "M": [[1.0], [1.0]], "x0": [0.25, -0.25]})");
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / "hodyn_io_test" / name;
}

}  // namespace

TEST(ConfigJson, ParsesOneBasedIdsAndDefaultsUniformWeights) {
  const auto cfg = config_from_json(tiny());
  EXPECT_EQ(cfg.n(), 2u);
  ASSERT_EQ(cfg.complex.size(), 1u);
  EXPECT_EQ(cfg.complex.simplices[0].members, (IndexSet{0, 1}));
  EXPECT_EQ(cfg.complex.simplices[0].weights, (std::vector<double>{0.5, 0.5}));
  EXPECT_TRUE(validate_config(cfg).ok());
}

TEST(ConfigJson, RoundTripIsExact) {
  for (const auto& name : scenario_names()) {
    const auto cfg = build_scenario(name).cfg;
    EXPECT_EQ(parse_config(config_to_json(cfg).dump()), cfg) << name;
  }
  const auto path = scratch("round/trip.json");
  const auto cfg = build_scenario("hom-a", 3).cfg;
  save_config(cfg, path);
  EXPECT_EQ(load_config(path), cfg);
}

TEST(ConfigJson, MalformedTextReportsPosition) {
  const std::string msg = error_of("{\n  \"n\": 2,\n  \"lambda\": [0.5,, 0]\n}");
  EXPECT_NE(msg.find("malformed JSON at line 3"), std::string::npos) << msg;
}

TEST(ConfigJson, MissingAndMistypedFieldsAreNamed) {
  auto j = tiny();
  j.erase("gamma");
  EXPECT_NE(error_of(j.dump()).find("missing field 'gamma'"), std::string::npos);
  j = tiny();
  j["u"][1] = "zero";
  EXPECT_NE(error_of(j.dump()).find("u[2]"), std::string::npos);
  j = tiny();
  j["n"] = 2.5;
  EXPECT_NE(error_of(j.dump()).find("'n'"), std::string::npos);
  j = tiny();
  j["simplices"][0]["members"][0] = 0;
  EXPECT_NE(error_of(j.dump()).find("simplices[1].members[1]"), std::string::npos);
  EXPECT_NE(error_of("[1, 2]").find("JSON object"), std::string::npos);
}

TEST(ConfigJson, RaggedMatrixIsAParseError) {
  auto j = tiny();
  j["W"][1] = json::array({1.0});
  EXPECT_NE(error_of(j.dump()).find("W[2]"), std::string::npos);
}

TEST(ConfigJson, DimensionMismatchIsLeftToValidation) {
  auto j = tiny();
  j["lambda"] = json::array({0.5, 0.0, 1.0});
  const auto cfg = parse_config(j.dump());
  EXPECT_FALSE(validate_config(cfg).ok());
}

TEST(Files, MissingFileIsAnIoError) {
  EXPECT_THROW(load_config("/nonexistent/dir/config.json"), IoError);
}

TEST(Trajectory, CsvHeaderRowsAndPrecision) {
  StopRule rule;
  rule.max_steps = 3;
  const auto traj = simulate(System(build_scenario("het-a").cfg), rule);
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x_1,x_2,x_3,x_4,x_5,x_6,x_7,x_8,x_9,x_10");
  std::size_t rows = 0;
  std::vector<std::string> last;
  while (std::getline(in, line)) {
    ++rows;
    last.clear();
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) last.push_back(cell);
    EXPECT_EQ(last.size(), 11u);
  }
  EXPECT_EQ(rows, traj.states.size());
  EXPECT_EQ(last[0], "3");
  for (int i = 0; i < 10; ++i) EXPECT_EQ(std::stod(last[i + 1]), traj.final_state()[i]);
}

TEST(Reports, TrajectoryMetadata) {
  const auto traj = simulate(System(build_scenario("hom-b").cfg));
  const auto j = trajectory_metadata(traj, 1e-6);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_EQ(j.at("steps").get<std::size_t>(), traj.steps());
  EXPECT_LT(j.at("finalSpread").get<double>(), 1e-6);
  EXPECT_NEAR(j.at("consensus").get<double>(), 0.0, 1e-6);

  StopRule rule;
  rule.max_steps = 10;
  const auto j2 = trajectory_metadata(simulate(System(build_scenario("het-a").cfg), rule), 1e-6);
  EXPECT_FALSE(j2.at("converged").get<bool>());
  EXPECT_TRUE(j2.at("convergenceStep").is_null());
  EXPECT_TRUE(j2.at("consensus").is_null());
}

TEST(Reports, StructureUsesOneBasedIds) {
  const auto j = structure_report_json(analyze_structure(System(build_scenario("het-a").cfg)));
  EXPECT_EQ(j.at("maximalCohesiveUnopinionated"), json::parse("[7,8,9,10]"));
  EXPECT_EQ(j.at("unopinionated"), json::parse("[7,8,9,10]"));
  EXPECT_FALSE(j.at("theorem31Satisfied").get<bool>());
  EXPECT_FALSE(j.at("theorem31Reasons").empty());
  const auto b = structure_report_json(analyze_structure(System(build_scenario("het-b").cfg)));
  EXPECT_TRUE(b.at("theorem31Satisfied").get<bool>());
  EXPECT_EQ(b.at("opinionatedWeakCohesiveWitness"), json::parse("[2,3]"));
}

TEST(Reports, RepeatExperiment) {
  const auto rep = run_repeat_experiment(build_scenario("appendix-l"), 3, 11);
  const auto j = repeat_report_json(rep);
  EXPECT_EQ(j.at("repetitions").get<std::size_t>(), 3u);
  ASSERT_EQ(j.at("runs").size(), 3u);
  EXPECT_EQ(j.at("runs")[0].at("x0").size(), 10u);
  const auto path = scratch("reports/repeat.json");
  save_report(j, path);
  EXPECT_EQ(json::parse(read_text(path)), j);
}
