#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bftsmpc/error.hpp"
#include "bftsmpc/metrics.hpp"
#include "bftsmpc/scenario.hpp"
#include "bftsmpc/scenario_io.hpp"
#include "bftsmpc/simulator.hpp"
#include "bftsmpc/trace_io.hpp"
#include "oracles.hpp"

namespace bftsmpc {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bftsmpc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SimulationTrace short_run(const std::string& scenario, StrategyType type, int steps) {
  Scenario sc = builtin_scenario(scenario);
  sc.duration_steps = steps;
  StrategyKind k;
  k.type = type;
  return run_scenario(sc, k, 42);
}

SimulationTrace bare_trace(PlannerConfig cfg, std::vector<StepRecord> steps) {
  SimulationTrace t;
  t.scenario = "synthetic";
  t.strategy = "none";
  t.planner = cfg;
  t.steps = std::move(steps);
  return t;
}

TEST(CumulativeCost, Examples) {
  PlannerConfig cfg;
  StepRecord at_ref;
  at_ref.state = cfg.reference();
  EXPECT_EQ(cumulative_cost(bare_trace(cfg, {at_ref, at_ref, at_ref})), 0.0);

  StepRecord one = at_ref;
  one.state.vx += 1.0;
  EXPECT_DOUBLE_EQ(cumulative_cost(bare_trace(cfg, {one})), 1.0);

  try {
    cumulative_cost(bare_trace(cfg, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyTrace);
  }
  EXPECT_THROW(safety_report(bare_trace(cfg, {})), Error);
}

TEST(CumulativeCost, UsesLoggedLaneReference) {
  PlannerConfig cfg;
  StepRecord s;
  s.state = cfg.reference();
  s.state.y = 3.5;
  s.y_lane = 3.5;
  EXPECT_EQ(cumulative_cost(bare_trace(cfg, {s})), 0.0);
}

TEST(CumulativeCost, AdditiveOverConcatenation) {
  const auto trace = short_run("highway", StrategyType::InversePlausibility, 40);
  auto a = trace;
  auto b = trace;
  a.steps.resize(17);
  b.steps.erase(b.steps.begin(), b.steps.begin() + 17);
  EXPECT_NEAR(cumulative_cost(a) + cumulative_cost(b), cumulative_cost(trace),
              1e-12 * cumulative_cost(trace));
  const auto series = cumulative_cost_series(trace);
  ASSERT_EQ(series.size(), trace.steps.size());
  EXPECT_EQ(series.back(), cumulative_cost(trace));
  for (std::size_t k = 1; k < series.size(); ++k) EXPECT_GE(series[k], series[k - 1]);
}

TEST(SafetyReport, CountsFromLoggedPoses) {
  PlannerConfig cfg;
  auto t = bare_trace(cfg, {});
  t.participants.push_back({"TP", "vehicle", 2.25, 0.9, {"keep"}});
  // Threshold along x: 2.25 + 2.25 + 0.25 = 4.75.
  for (double gap : {10.0, 4.65, 4.85, 20.0}) {
    StepRecord s;
    s.state = {0.0, 20.0, 0.0, 0.0};
    ParticipantRecord p;
    p.position = Vec2(gap, 0.0);
    p.distance = gap;
    s.participants.push_back(p);
    t.steps.push_back(s);
  }
  const auto r = safety_report(t);
  EXPECT_EQ(r.violations.at(0), 1);
  EXPECT_EQ(r.violation_steps, 1);
  EXPECT_DOUBLE_EQ(r.min_distance.at(0), 4.65);
  EXPECT_TRUE(safety_violated(t, 1, 0));
  EXPECT_FALSE(safety_violated(t, 2, 0));
  const auto again = safety_report(t);
  EXPECT_EQ(again.min_distance, r.min_distance);
  EXPECT_EQ(again.violations, r.violations);
}

TEST(TraceJson, RoundTripIsLossless) {
  const auto trace = short_run("intersection", StrategyType::BftTightening, 30);
  const auto back = trace_from_json(nlohmann::json::parse(trace_to_json(trace).dump()));
  ASSERT_EQ(back.steps.size(), trace.steps.size());
  EXPECT_EQ(back.scenario, trace.scenario);
  EXPECT_EQ(back.strategy, trace.strategy);
  EXPECT_EQ(back.seed, trace.seed);
  EXPECT_EQ(back.final_state, trace.final_state);
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& a = trace.steps[k];
    const auto& b = back.steps[k];
    EXPECT_NEAR(a.state.x, b.state.x, 1e-12);
    EXPECT_NEAR(a.state.vx, b.state.vx, 1e-12);
    EXPECT_NEAR(a.input.ax, b.input.ax, 1e-12);
    EXPECT_NEAR(a.input_prev.ay, b.input_prev.ay, 1e-12);
    EXPECT_NEAR(a.stage_cost, b.stage_cost, 1e-12);
    ASSERT_EQ(a.participants.size(), b.participants.size());
    for (std::size_t i = 0; i < a.participants.size(); ++i) {
      EXPECT_NEAR((a.participants[i].position - b.participants[i].position).norm(), 0.0, 1e-12);
      ASSERT_EQ(a.participants[i].modes.size(), b.participants[i].modes.size());
      for (std::size_t m = 0; m < a.participants[i].modes.size(); ++m) {
        EXPECT_NEAR(a.participants[i].modes[m].scale, b.participants[i].modes[m].scale, 1e-12);
        EXPECT_EQ(a.participants[i].modes[m].active, b.participants[i].modes[m].active);
      }
      ASSERT_EQ(a.participants[i].opinion.has_value(), b.participants[i].opinion.has_value());
    }
  }
  EXPECT_NEAR(cumulative_cost(back), cumulative_cost(trace), 1e-12);
}

TEST(TraceJson, MalformedDocumentNamesTheField) {
  auto doc = trace_to_json(short_run("highway", StrategyType::MostLikely, 3));
  doc["steps"][1].erase("state");
  try {
    trace_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("steps[1]"), std::string::npos);
  }
}

TEST(TraceCsv, HeaderIsStableAndDocumented) {
  const auto a = trace_to_csv(short_run("highway", StrategyType::InversePlausibility, 5));
  const auto b = trace_to_csv(short_run("highway", StrategyType::AllModesFixedBeta, 7));
  const auto header = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  EXPECT_EQ(header(a), header(b));
  EXPECT_EQ(header(a).rfind(
                "step,time,x,vx,y,vy,ax,ay,ax_prev,ay_prev,y_lane,stage_cost,cumulative_cost,"
                "plan_cost,slack_used,max_violation,iterations,converged,solver_failed,TP1_x,TP1_y,"
                "TP1_heading,TP1_distance,TP1_violation,TP1_keep_p,",
                0),
            0u);
}

TEST(TraceCsv, RecomputedCostMatches) {
  for (const char* name : {"highway", "intersection"}) {
    const auto trace = short_run(name, StrategyType::InversePlausibility, 60);
    const double j = cumulative_cost(trace);
    EXPECT_NEAR(oracle::csv_cumulative_cost(trace_to_csv(trace), trace.planner), j, 1e-9 * j) << name;
  }
}

TEST(ExportTrace, WritesAllFilesAndMonotoneCost) {
  const auto dir = scratch_dir("export");
  const auto trace = short_run("highway", StrategyType::BftTightening, 25);
  export_trace(trace, dir, "run");
  for (const char* f : {"run.csv", "run.json", "run_vx.dat", "run_path.dat", "run_cost.dat"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::istringstream cost(read_text_file(dir / "run_cost.dat"));
  double t = 0.0;
  double c = 0.0;
  double prev = -1.0;
  int rows = 0;
  std::string line;
  while (std::getline(cost, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream(line) >> t >> c;
    EXPECT_GE(c, prev);
    prev = c;
    ++rows;
  }
  EXPECT_EQ(rows, 25);
  EXPECT_NEAR(cumulative_cost(load_trace_file(dir / "run.json")), cumulative_cost(trace), 1e-12);
  fs::remove_all(dir);
}

TEST(ExportTrace, UnwritableDirectoryIsIoError) {
  const auto dir = scratch_dir("blocked");
  write_text_file(dir / "file", "x");
  try {
    export_trace(short_run("highway", StrategyType::MostLikely, 2), dir / "file" / "sub", "run");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  EXPECT_THROW(load_trace_file(dir / "missing.json"), Error);
  fs::remove_all(dir);
}

TEST(ScenarioJson, BuiltinsRoundTrip) {
  for (const auto& sc : builtin_scenarios()) {
    const auto doc = scenario_to_json(sc);
    const auto back = scenario_from_json(nlohmann::json::parse(doc.dump()));
    EXPECT_EQ(scenario_to_json(back), doc) << sc.name;
    EXPECT_TRUE(scenario_problems(back).empty());
  }
}

TEST(ScenarioJson, ShippedFilesMatchBuiltins) {
  for (const auto& sc : builtin_scenarios()) {
    const auto file = fs::path(BFTSMPC_SOURCE_DIR) / "scenarios" / (sc.name + ".json");
    EXPECT_EQ(scenario_to_json(load_scenario_file(file)), scenario_to_json(sc)) << file;
  }
}

TEST(ScenarioJson, KeyframeErrorCarriesTime) {
  auto doc = scenario_to_json(builtin_scenario("highway"));
  auto& masses = doc["participants"][0]["belief"]["keyframes"][1]["masses"];
  masses = {{"keep", 0.6}, {"change", 0.6}};
  try {
    scenario_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NormalizationViolation);
    EXPECT_NE(std::string(e.what()).find("t=4 s"), std::string::npos) << e.what();
  }
}

TEST(PlannerConfigJson, MissingKeysKeepDefaults) {
  const auto cfg = planner_config_from_json(nlohmann::json::parse(R"({"v_ref": 12.5})"));
  EXPECT_EQ(cfg.v_ref, 12.5);
  EXPECT_EQ(cfg.horizon, PlannerConfig{}.horizon);
  EXPECT_THROW(planner_config_from_json(nlohmann::json::parse(R"({"horizon": "eight"})")), Error);
}

}  // namespace
}  // namespace bftsmpc
