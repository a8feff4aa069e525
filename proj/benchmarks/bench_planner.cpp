#include <benchmark/benchmark.h>

#include "bftsmpc/planner.hpp"
#include "bftsmpc/scenario.hpp"
#include "bftsmpc/simulator.hpp"
#include "bftsmpc/strategy.hpp"

namespace {

using namespace bftsmpc;

ConstraintSet blocking_set(const PlannerConfig& cfg, int ellipses) {
  ConstraintSet cs(cfg.horizon);
  for (int k = 0; k < cfg.horizon; ++k) {
    for (int e = 0; e < ellipses; ++e) {
      const Vec2 c(25.0 + 2.8 * (k + 1) + 6.0 * e, 0.3 * e);
      cs[k].push_back(build_ellipse(c, Mat2::Identity() * 0.1 * (k + 1), 0.85, {4.75, 2.05}));
    }
  }
  return cs;
}

void BM_SolveOcp(benchmark::State& state) {
  PlannerConfig cfg;
  cfg.state_bounds.y_min = -0.85;
  cfg.state_bounds.y_max = 4.5;
  const auto cs = blocking_set(cfg, static_cast<int>(state.range(0)));
  const EgoState s0{0.0, 24.0, 0.6, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_ocp(s0, {}, cs, cfg));
}
BENCHMARK(BM_SolveOcp)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_SoftObjectiveGradient(benchmark::State& state) {
  PlannerConfig cfg;
  const auto cs = blocking_set(cfg, 4);
  const SoftObjective f({0.0, 20.0, 0.0, 0.0}, {}, cs, cfg);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(f.dimension(), 0.3);
  Eigen::VectorXd g;
  for (auto _ : state) benchmark::DoNotOptimize(f(u, &g));
}
BENCHMARK(BM_SoftObjectiveGradient);

void BM_RunScenario(benchmark::State& state) {
  const auto sc = builtin_scenario(state.range(0) == 0 ? "highway" : "intersection");
  const auto k = StrategyKind::parse("bft-tightening");
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(sc, k, 42));
}
BENCHMARK(BM_RunScenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
