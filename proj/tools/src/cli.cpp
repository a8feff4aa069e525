#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bftsmpc/error.hpp"
#include "bftsmpc/metrics.hpp"
#include "bftsmpc/scenario.hpp"
#include "bftsmpc/scenario_io.hpp"
#include "bftsmpc/simulator.hpp"
#include "bftsmpc/strategy.hpp"
#include "bftsmpc/trace_io.hpp"

namespace bftsmpc::cli {

namespace {

namespace fs = std::filesystem;

/// Raised for problems with the user's inputs (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string scenario = "highway";
  std::vector<std::string> strategies;
  std::uint64_t seed = 42;
  int sweep = 1;
  std::string out = "out";
  std::string config;
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<double> beta;
};

Scenario resolve_scenario(const RunOptions& opts) {
  Scenario sc;
  try {
    const bool builtin = [&] {
      for (const auto& b : builtin_scenarios()) {
        if (b.name == opts.scenario) return true;
      }
      return false;
    }();
    if (builtin) {
      sc = builtin_scenario(opts.scenario);
    } else if (fs::exists(opts.scenario)) {
      sc = load_scenario_file(opts.scenario);
    } else {
      throw ConfigError("'" + opts.scenario + "' is neither a builtin scenario nor a file");
    }
    if (!opts.config.empty()) {
      const auto patch = nlohmann::json::parse(read_text_file(opts.config));
      if (!patch.is_object()) throw ConfigError(opts.config + ": expected a JSON object");
      // Accept either a bare planner object or {"planner": {...}}.
      const auto& overrides = patch.contains("planner") ? patch["planner"] : patch;
      auto merged = planner_config_to_json(sc.planner);
      merged.merge_patch(overrides);
      sc.planner = planner_config_from_json(merged, opts.config);
    }
    validate_scenario(sc);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(opts.config + ": " + e.what());
  }
  return sc;
}

StrategyKind make_strategy(const std::string& name, const RunOptions& opts) {
  try {
    StrategyKind k = StrategyKind::parse(name);
    if (opts.beta) k.beta = *opts.beta;
    if (opts.gamma) k.tightening.gamma = *opts.gamma;
    if (opts.alpha) k.tightening.alpha = *opts.alpha;
    k.validate();
    return k;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string stem_for(const SimulationTrace& t) {
  return t.scenario + "_" + t.strategy + "_seed" + std::to_string(t.seed);
}

/// Exports the trace and summarises the re-read JSON document, so every
/// reported number is reproducible from the files on disk.
RunSummary export_and_summarize(const SimulationTrace& trace, const fs::path& dir) {
  const auto stem = stem_for(trace);
  export_trace(trace, dir, stem);
  const auto summary = summarize(load_trace_file(dir / (stem + ".json")));
  write_text_file(dir / (stem + "_summary.json"), summary_to_json(summary).dump(2) + '\n');
  return summary;
}

std::string cell(const char* format, const std::string& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v.c_str());
  return buf;
}

std::string comparison_table(const std::vector<RunSummary>& rows) {
  if (rows.empty()) return {};
  std::ostringstream os;
  os << cell("%-22s", "strategy") << cell("%12s", "J_sim");
  for (const auto& id : rows.front().participant_ids) os << cell("%14s", "mind(" + id + ")");
  for (const auto& id : rows.front().participant_ids) os << cell("%11s", "viol(" + id + ")");
  os << cell("%10s", "overtake") << cell("%9s", "min_ax") << '\n';
  for (const auto& r : rows) {
    os << cell("%-22s", r.strategy) << fmt("%12.3f", r.j_sim);
    for (double d : r.safety.min_distance) os << fmt("%14.3f", d);
    for (int v : r.safety.violations) os << cell("%11s", std::to_string(v));
    os << cell("%10s", r.overtook_target ? "yes" : "no") << fmt("%9.3f", r.min_ax) << '\n';
  }
  return os.str();
}

std::string comparison_csv(const std::vector<RunSummary>& rows) {
  std::ostringstream os;
  os << "scenario,strategy,seed,j_sim,violation_steps,slack_events,solver_failures,overtook_target,min_ax";
  if (!rows.empty()) {
    for (const auto& id : rows.front().participant_ids) os << ",min_distance_" << id << ",violations_" << id;
  }
  os << '\n';
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.strategy << ',' << r.seed << ',' << fmt("%.12g", r.j_sim) << ','
       << r.safety.violation_steps << ',' << r.safety.slack_events << ',' << r.safety.solver_failures
       << ',' << (r.overtook_target ? 1 : 0) << ',' << fmt("%.12g", r.min_ax);
    for (std::size_t i = 0; i < r.participant_ids.size(); ++i) {
      os << ',' << fmt("%.12g", r.safety.min_distance[i]) << ',' << r.safety.violations[i];
    }
    os << '\n';
  }
  return os.str();
}

int cmd_run(const RunOptions& opts, std::ostream& out) {
  const Scenario sc = resolve_scenario(opts);
  const StrategyKind strategy =
      make_strategy(opts.strategies.empty() ? "inverse-plausibility" : opts.strategies.front(), opts);
  const auto trace = run_scenario(sc, strategy, opts.seed);
  const auto summary = export_and_summarize(trace, opts.out);
  out << comparison_table({summary});
  out << "trace written to " << (fs::path(opts.out) / stem_for(trace)).string() << ".{csv,json}\n";
  return kExitOk;
}

int cmd_compare(const RunOptions& opts, std::ostream& out) {
  const Scenario sc = resolve_scenario(opts);
  std::vector<std::string> names = opts.strategies;
  if (names.empty()) {
    for (const auto& k : all_strategies()) names.push_back(k.name());
  }
  if (names.size() < 2) throw ConfigError("compare needs at least two strategies");
  if (opts.sweep < 1) throw ConfigError("--sweep must be >= 1");
  std::vector<StrategyKind> kinds;
  for (const auto& n : names) kinds.push_back(make_strategy(n, opts));

  std::vector<RunSummary> first_seed;
  std::vector<RunSummary> all_rows;
  for (int s = 0; s < opts.sweep; ++s) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(s);
    std::vector<std::future<SimulationTrace>> jobs;
    for (const auto& k : kinds) {
      jobs.push_back(std::async(std::launch::async, [&sc, k, seed] { return run_scenario(sc, k, seed); }));
    }
    for (auto& job : jobs) {
      const auto summary = export_and_summarize(job.get(), opts.out);
      if (s == 0) first_seed.push_back(summary);
      all_rows.push_back(summary);
    }
  }
  const auto table = comparison_table(first_seed);
  out << "scenario " << sc.name << ", seed " << opts.seed << "\n" << table;
  write_text_file(fs::path(opts.out) / (sc.name + "_comparison.txt"), table);
  write_text_file(fs::path(opts.out) / (sc.name + "_comparison.csv"), comparison_csv(first_seed));
  if (opts.sweep > 1) {
    write_text_file(fs::path(opts.out) / (sc.name + "_sweep.csv"), comparison_csv(all_rows));
    out << "seed sweep (" << opts.sweep << " seeds) written to "
        << (fs::path(opts.out) / (sc.name + "_sweep.csv")).string() << '\n';
  }
  return kExitOk;
}

int cmd_validate(const std::string& file, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = load_scenario_file(file);
  } catch (const Error& e) {
    err << file << ": " << e.what() << '\n';
    return kExitConfig;
  }
  const auto problems = scenario_problems(sc);
  if (problems.empty()) {
    out << file << ": valid (" << sc.name << ")\n";
    return kExitOk;
  }
  err << file << ": " << problems.size() << " problem(s)\n";
  for (const auto& p : problems) err << "  " << p << '\n';
  return kExitConfig;
}

int cmd_export_scenario(const std::string& name, const std::string& dir, std::ostream& out) {
  std::vector<Scenario> selected;
  for (auto& sc : builtin_scenarios()) {
    if (name == "all" || sc.name == name) selected.push_back(std::move(sc));
  }
  if (selected.empty()) throw ConfigError("unknown builtin scenario '" + name + "'");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir + "': " + ec.message());
  for (const auto& sc : selected) {
    const auto path = fs::path(dir) / (sc.name + ".json");
    save_scenario_file(sc, path);
    out << "wrote " << path.string() << '\n';
  }
  return kExitOk;
}

void add_run_options(CLI::App* cmd, RunOptions& opts, bool many_strategies) {
  cmd->add_option("--scenario", opts.scenario, "Builtin scenario name or scenario JSON file")
      ->capture_default_str();
  if (many_strategies) {
    cmd->add_option("--strategy", opts.strategies,
                    "Strategies to compare (default: all five)")
        ->delimiter(',');
    cmd->add_option("--sweep", opts.sweep, "Also run seeds seed..seed+N-1 and write a sweep table")
        ->capture_default_str();
  } else {
    cmd->add_option("--strategy", opts.strategies,
                    "most-likely | all-modes | belief-scaled | inverse-plausibility | bft-tightening")
        ->expected(1)
        ->default_str("inverse-plausibility");
  }
  cmd->add_option("--seed", opts.seed, "Random seed for belief noise")->capture_default_str();
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
  cmd->add_option("--config", opts.config, "JSON file with planner overrides");
  cmd->add_option("--gamma", opts.gamma, "Tightening gamma (bft-tightening), default 0.5");
  cmd->add_option("--alpha", opts.alpha, "Tightening threshold alpha (bft-tightening), default 0.1");
  cmd->add_option("--beta", opts.beta, "Fixed risk parameter (most-likely, all-modes), default 0.85");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Belief-function-aware stochastic MPC: scenario runner"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run one strategy on a scenario and export the trace");
  add_run_options(run_cmd, run_opts, false);

  RunOptions cmp_opts;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several strategies and print a comparison table");
  add_run_options(cmp_cmd, cmp_opts, true);

  std::string validate_file;
  auto* val_cmd = app.add_subcommand("validate", "Check a scenario file and list every problem");
  val_cmd->add_option("file", validate_file, "Scenario JSON file")->required();

  std::string export_name = "all";
  std::string export_dir = "scenarios";
  auto* exp_cmd = app.add_subcommand("export-scenario", "Write builtin scenarios as JSON files");
  exp_cmd->add_option("--scenario", export_name, "Builtin name or 'all'")->capture_default_str();
  exp_cmd->add_option("--out", export_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, out);
    if (*cmp_cmd) return cmd_compare(cmp_opts, out);
    if (*val_cmd) return cmd_validate(validate_file, out, err);
    if (*exp_cmd) return cmd_export_scenario(export_name, export_dir, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace bftsmpc::cli
