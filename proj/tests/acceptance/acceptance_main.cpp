// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bftsmpc/belief_transforms.hpp"
#include "bftsmpc/metrics.hpp"
#include "bftsmpc/planner.hpp"
#include "bftsmpc/risk_constraints.hpp"
#include "bftsmpc/scenario.hpp"
#include "bftsmpc/simulator.hpp"
#include "bftsmpc/strategy.hpp"
#include "bftsmpc/trace_io.hpp"
#include "oracles.hpp"

namespace {

using namespace bftsmpc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kDefaultSeed = 42;

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Verdict()> check;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Verdict c1_worked_example() {
  const Frame f = Frame::indexed(2);
  const auto o = validate_opinion(f, {{f.singleton(0), 0.4}, {f.singleton(1), 0.1}, {f.full(), 0.5}});
  const auto ip = inverse_plausibility_transform(o);
  const auto ss = scaled_singleton_probabilities(o);
  const double err = std::max({std::abs(ip[0] - 0.6), std::abs(ip[1] - 0.4), std::abs(ss[0] - 0.8),
                               std::abs(ss[1] - 0.2)});
  return {err <= 1e-9, format("IP=[%.12f, %.12f] scaled=[%.12f, %.12f] max err %.1e", ip[0], ip[1],
                              ss[0], ss[1], err)};
}

Verdict c2_probability_bounds() {
  std::mt19937_64 rng(20240601);
  constexpr int kOpinions = 100000;
  int failures = 0;
  double worst_bound = 0.0;
  double worst_sum = 0.0;
  for (int trial = 0; trial < kOpinions; ++trial) {
    const int n = 2 + trial % 4;
    const auto m = trial % 2 ? oracle::random_masses(n, rng) : oracle::random_sparse_masses(n, rng);
    const auto o = validate_opinion(Frame::indexed(n), oracle::to_mass_map(m));
    const auto p = inverse_plausibility_transform(o);
    double total = 0.0;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const double b = belief(o, singleton_subset(i));
      const double pl = plausibility(o, singleton_subset(i));
      worst_bound = std::max({worst_bound, b - p[i], p[i] - pl});
      ok = ok && b <= p[i] && p[i] <= pl;
      total += p[i];
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    ok = ok && std::abs(total - 1.0) <= 1e-9;
    if (!ok) ++failures;
  }
  return {failures == 0, format("%d opinions, n_e 2..5, %d failures, worst bound excess %.1e, "
                                "worst |sum-1| %.1e",
                                kOpinions, failures, worst_bound, worst_sum)};
}

Verdict c3_tightening_branches() {
  const TighteningParams params;
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kPairs = 100000;
  int failures = 0;
  int tightening = 0;
  int relaxing = 0;
  for (int trial = 0; trial < kPairs; ++trial) {
    const double pl = unit(rng);
    // Every tenth pair has mu = 0 to exercise the no-tightening identity.
    const double mu = trial % 10 == 0 ? 0.0 : pl * unit(rng);
    const double s = tightening_scale(params, pl, mu);
    bool ok;
    if (pl >= params.alpha) {
      ++tightening;
      ok = params.gamma <= s && s <= 1.0;
      if (mu == 0.0) ok = ok && s == 1.0;
    } else {
      ++relaxing;
      ok = s >= 1.0 / params.gamma;
    }
    if (!ok) ++failures;
  }
  return {failures == 0, format("%d pairs (%d with pl >= alpha, %d relaxing), %d failures", kPairs,
                                tightening, relaxing, failures)};
}

Verdict c4_solver_oracle() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    PlannerConfig cfg;
    // Bounds wide enough that only the input box can bind.
    cfg.state_bounds = {-1e3, 1e3, -1e3, 1e3, 1e3};
    const EgoState s0{10.0 * unit(rng), 20.0 + 8.0 * unit(rng), 2.0 * unit(rng), unit(rng)};
    const EgoInput up{2.0 * unit(rng), unit(rng)};
    const ConstraintSet none(static_cast<std::size_t>(cfg.horizon));
    const auto r = solve_ocp(s0, up, none, cfg);
    const SoftObjective f(s0, up, none, cfg);
    const auto qp = oracle::condense(s0, up, cfg);
    const double ref = qp.value(oracle::minimize_box_qp(qp, f.lower_bounds(), f.upper_bounds()));
    const double rel = std::abs(r.cost - ref) / std::abs(ref);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-4)) ++failures;
  }
  return {failures == 0, format("20 initial states, worst relative cost gap %.2e", worst)};
}

Verdict c5_gradient_check() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int points = 0;
  int with_active_ellipse = 0;
  int failures = 0;
  double worst = 0.0;
  while (points < 100) {
    PlannerConfig cfg;
    cfg.v_ref = 15.0;
    cfg.state_bounds.y_min = -1.0;
    cfg.state_bounds.y_max = 4.5;
    const EgoState s0{0.0, 15.0 + 3.0 * unit(rng), 0.5 * unit(rng), 0.3 * unit(rng)};
    const EgoInput up{unit(rng), 0.5 * unit(rng)};
    ConstraintSet cs(cfg.horizon);
    // Every fourth scene puts the participant well out of reach.
    const double offset = points % 4 == 3 ? 80.0 : 0.0;
    const Vec2 start(12.0 + offset + 8.0 * unit(rng), 1.5 * unit(rng));
    const Vec2 vel(4.0 * unit(rng), 0.5 * unit(rng));
    for (int k = 0; k < cfg.horizon; ++k) {
      const Vec2 c = start + vel * (k + 1) * cfg.sampling_time;
      auto e = build_ellipse(c, Mat2::Identity() * 0.1 * (k + 1), 0.9, {4.0, 1.8});
      if (points % 3 == 1) e = tighten_ellipse(e, TighteningParams{}, 0.7, 0.3);
      cs[k].push_back(e);
    }
    const SoftObjective f(s0, up, cs, cfg);
    Eigen::VectorXd u(f.dimension());
    for (int i = 0; i < u.size(); ++i) {
      u[i] = std::clamp(3.0 * unit(rng), f.lower_bounds()[i], f.upper_bounds()[i]);
    }

    // Skip points that sit within the finite-difference reach of the penalty kink.
    const auto states = f.rollout(u);
    const double backoff = cfg.solver.constraint_backoff;
    bool near_kink = false;
    bool active = false;
    for (int k = 1; k <= cfg.horizon; ++k) {
      const auto& s = states[k];
      const auto& b = cfg.state_bounds;
      std::vector<double> hs = {s.y - b.y_min, b.y_max - s.y, s.vx - b.vx_min,
                                b.vx_max - s.vx, s.vy + b.vy_max, b.vy_max - s.vy};
      for (const auto& c : cs[k - 1]) {
        const double h = evaluate_constraint(s.position(), c);
        hs.push_back(h);
        active = active || h < backoff;
      }
      for (double h : hs) near_kink = near_kink || std::abs(h - backoff) < 1e-4;
    }
    if (near_kink) continue;
    ++points;
    if (active) ++with_active_ellipse;

    Eigen::VectorXd g;
    f(u, &g);
    for (int i = 0; i < u.size(); ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
      Eigen::VectorXd hi = u;
      Eigen::VectorXd lo = u;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (f(hi) - f(lo)) / (2.0 * h);
      const double rel = std::abs(g[i] - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      if (!(rel <= 1e-4)) ++failures;
    }
  }
  const bool enough_active = with_active_ellipse >= 20 && with_active_ellipse < points;
  return {failures == 0 && enough_active,
          format("%d points (%d with an active ellipse), %d component failures, worst relative "
                 "error %.2e",
                 points, with_active_ellipse, failures, worst)};
}

struct RunRecord {
  SimulationTrace trace;
  RunSummary summary;
  double seconds = 0.0;
};

std::map<std::string, RunRecord> run_all(const std::string& scenario) {
  std::map<std::string, RunRecord> out;
  const Scenario sc = builtin_scenario(scenario);
  for (const auto& k : all_strategies()) {
    const auto t0 = Clock::now();
    RunRecord r;
    r.trace = run_scenario(sc, k, kDefaultSeed);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.summary = summarize(r.trace);
    out[k.name()] = std::move(r);
  }
  return out;
}

std::size_t participant_index(const SimulationTrace& t, const std::string& id) {
  for (std::size_t i = 0; i < t.participants.size(); ++i) {
    if (t.participants[i].id == id) return i;
  }
  return t.participants.size();
}

double slowest(const std::map<std::string, RunRecord>& runs) {
  double s = 0.0;
  for (const auto& [name, r] : runs) s = std::max(s, r.seconds);
  return s;
}

Verdict c6_highway() {
  const auto runs = run_all("highway");
  const auto& ml = runs.at("most-likely");
  const auto& all = runs.at("all-modes");
  const auto& ip = runs.at("inverse-plausibility");
  const auto& bft = runs.at("bft-tightening");
  const auto tp1 = participant_index(all.trace, "TP1");
  const auto tp2 = participant_index(ml.trace, "TP2");

  const bool ordering = ip.summary.j_sim < bft.summary.j_sim && bft.summary.j_sim < all.summary.j_sim;
  const int ml_tp2 = ml.summary.safety.violations.at(tp2);
  const bool ml_violates = ml_tp2 >= 1;
  const bool safe = ip.summary.safety.violation_steps == 0 && bft.summary.safety.violation_steps == 0;
  bool never_passes = all.trace.final_state.x < all.trace.final_participant_positions.at(tp1).x();
  for (const auto& s : all.trace.steps) {
    never_passes = never_passes && s.state.x < s.participants.at(tp1).position.x();
  }
  const bool in_budget = slowest(runs) <= 60.0;
  return {ordering && ml_violates && safe && never_passes && in_budget,
          format("J_sim IP %.1f < BftT %.1f < AllModes %.1f [%s]; ML TP2 violations %d; IP/BftT "
                 "violation steps %d/%d; AllModes behind TP1 throughout [%s]; slowest run %.2f s",
                 ip.summary.j_sim, bft.summary.j_sim, all.summary.j_sim, ordering ? "ok" : "FAIL",
                 ml_tp2, ip.summary.safety.violation_steps, bft.summary.safety.violation_steps,
                 never_passes ? "ok" : "FAIL", slowest(runs))};
}

Verdict c7_intersection() {
  const auto runs = run_all("intersection");
  const auto& ml = runs.at("most-likely");
  const auto& all = runs.at("all-modes");
  const auto& ip = runs.at("inverse-plausibility");
  const auto& bft = runs.at("bft-tightening");

  const bool safe = ip.summary.safety.violation_steps == 0 && bft.summary.safety.violation_steps == 0;
  const bool cheaper = ip.summary.j_sim < all.summary.j_sim && bft.summary.j_sim < all.summary.j_sim;
  const bool blocked = !all.summary.overtook_target;
  bool hardest_brake = true;
  double runner_up = std::numeric_limits<double>::infinity();
  for (const auto& [name, r] : runs) {
    if (name == "most-likely") continue;
    runner_up = std::min(runner_up, r.summary.min_ax);
    hardest_brake = hardest_brake && ml.summary.min_ax < r.summary.min_ax;
  }
  const bool in_budget = slowest(runs) <= 90.0;
  return {safe && cheaper && blocked && hardest_brake && in_budget,
          format("IP/BftT violation steps %d/%d; J_sim IP %.1f, BftT %.1f vs AllModes %.1f [%s]; "
                 "AllModes passed TP1 [%s]; ML min ax %.2f vs others >= %.2f [%s]; slowest run %.2f s",
                 ip.summary.safety.violation_steps, bft.summary.safety.violation_steps,
                 ip.summary.j_sim, bft.summary.j_sim, all.summary.j_sim, cheaper ? "ok" : "FAIL",
                 blocked ? "no" : "yes", ml.summary.min_ax, runner_up,
                 hardest_brake ? "ok" : "FAIL", slowest(runs))};
}

fs::path scratch(const std::string& leaf) {
  const auto dir = fs::temp_directory_path() / "bftsmpc_acceptance" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Verdict c8_determinism() {
  int compared = 0;
  int mismatches = 0;
  for (const auto& sc : builtin_scenarios()) {
    for (const auto& k : all_strategies()) {
      const std::string stem = sc.name + "_" + k.name();
      const auto a = scratch("a");
      const auto b = scratch("b");
      export_trace(run_scenario(sc, k, kDefaultSeed), a, stem);
      export_trace(run_scenario(sc, k, kDefaultSeed), b, stem);
      for (const auto& entry : fs::directory_iterator(a)) {
        ++compared;
        const auto other = b / entry.path().filename();
        if (!fs::exists(other) || read_text_file(entry.path()) != read_text_file(other)) {
          ++mismatches;
          std::fprintf(stderr, "  differs: %s\n", entry.path().filename().string().c_str());
        }
      }
    }
  }
  fs::remove_all(fs::temp_directory_path() / "bftsmpc_acceptance");
  return {mismatches == 0 && compared > 0,
          format("%d exported files over 2 scenarios x 5 strategies, %d mismatches", compared,
                 mismatches)};
}

Verdict c9_round_trip() {
  double worst_json = 0.0;
  double worst_csv = 0.0;
  int runs = 0;
  for (const auto& sc : builtin_scenarios()) {
    for (const auto& k : all_strategies()) {
      const auto trace = run_scenario(sc, k, kDefaultSeed);
      const auto dir = scratch("rt");
      export_trace(trace, dir, "run");
      const double j = cumulative_cost(trace);
      const double j_json = cumulative_cost(load_trace_file(dir / "run.json"));
      const double j_csv = oracle::csv_cumulative_cost(read_text_file(dir / "run.csv"), trace.planner);
      worst_json = std::max(worst_json, std::abs(j_json - j));
      worst_csv = std::max(worst_csv, std::abs(j_csv - j) / j);
      ++runs;
    }
  }
  fs::remove_all(fs::temp_directory_path() / "bftsmpc_acceptance");
  return {worst_json <= 1e-9 && worst_csv <= 1e-9,
          format("%d runs; JSON re-parse worst |dJ| %.1e; CSV recompute worst relative dJ %.1e", runs,
                 worst_json, worst_csv)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked-example exactness", 1.0, c1_worked_example},
      {2, "probability bounds over random opinions", 10.0, c2_probability_bounds},
      {3, "tightening branch properties", 5.0, c3_tightening_branches},
      {4, "solver matches first-order oracle", 30.0, c4_solver_oracle},
      {5, "gradient vs central differences", 30.0, c5_gradient_check},
      {6, "highway qualitative reproduction", 300.0, c6_highway},
      {7, "intersection qualitative reproduction", 450.0, c7_intersection},
      {8, "byte-identical reruns", 120.0, c8_determinism},
      {9, "export round-trip fidelity", 120.0, c9_round_trip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = v.pass && secs <= c.budget_s;
    if (!pass) ++failed;
    std::printf("%s  C%d %s (%.2f s, budget %.0f s): %s\n", pass ? "PASS" : "FAIL", c.id, c.title,
                secs, c.budget_s, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
