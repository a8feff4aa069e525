#include <benchmark/benchmark.h>

#include <random>

#include "bftsmpc/belief_transforms.hpp"
#include "bftsmpc/risk_constraints.hpp"

namespace {

using namespace bftsmpc;

Opinion random_opinion(std::size_t n, int focal, std::mt19937_64& rng) {
  const Frame f = Frame::indexed(n);
  std::uniform_int_distribution<std::uint32_t> pick(1, f.full().bits);
  std::exponential_distribution<double> expo(1.0);
  MassMap m;
  for (int j = 0; j < focal; ++j) m[SubsetId{pick(rng)}] += expo(rng);
  m[f.singleton(0)] += 0.1;
  return validate_opinion(f, m, true);
}

void BM_InversePlausibility(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto o = random_opinion(static_cast<std::size_t>(state.range(0)),
                                static_cast<int>(state.range(1)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(inverse_plausibility_transform(o));
}
BENCHMARK(BM_InversePlausibility)->Args({2, 3})->Args({3, 7})->Args({5, 31})->Args({16, 256});

void BM_ScaledSingletons(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto o = random_opinion(static_cast<std::size_t>(state.range(0)), 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(scaled_singleton_probabilities(o));
}
BENCHMARK(BM_ScaledSingletons)->Arg(3)->Arg(16);

void BM_BuildAndTightenEllipse(benchmark::State& state) {
  Mat2 cov;
  cov << 0.6, 0.2, 0.2, 0.3;
  const EllipseGeometry g{4.75, 2.05};
  const TighteningParams params;
  for (auto _ : state) {
    const auto c = build_ellipse(Vec2(30.0, 3.5), cov, 0.85, g);
    benchmark::DoNotOptimize(tighten_ellipse(c, params, 0.7, 0.3));
  }
}
BENCHMARK(BM_BuildAndTightenEllipse);

}  // namespace
