#include <benchmark/benchmark.h>

#include "vidalign/vidalign.hpp"

namespace {

using namespace vidalign;

Matrix random_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  SplitMix64 rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

FeatureSeries random_series(std::uint64_t seed, std::size_t frames) {
  return {"bench", random_matrix(seed, frames, kFeatureWidth)};
}

SubjectTrack random_track(std::uint64_t seed, std::size_t frames) {
  SplitMix64 rng(seed);
  SubjectTrack t;
  t.frames.resize(frames);
  for (auto& f : t.frames) {
    if (rng.uniform() > 0.1) f.box = Box{{rng.uniform(100, 500), rng.uniform(100, 300)}, rng.uniform(40, 120), rng.uniform(80, 240)};
    if (rng.uniform() > 0.1) {
      Pose p;
      for (auto& k : p) k = {rng.uniform(0, 640), rng.uniform(0, 480)};
      f.pose = p;
    }
  }
  t.frames.front().box = Box{{320, 240}, 80, 160};
  Pose p;
  for (auto& k : p) k = {320, 240};
  t.frames.front().pose = p;
  return t;
}

void BM_CostMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FeatureSeries a = random_series(1, n);
  const FeatureSeries b = random_series(2, n);
  for (auto _ : state) benchmark::DoNotOptimize(cost_matrix(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CostMatrix)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared);

void BM_DpAlign(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(3);
  CostMatrix c(n, n);
  for (double& v : c.data()) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(dp_align(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DpAlign)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_Ddtw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FeatureSeries a = random_series(4, n);
  const FeatureSeries b = random_series(5, n + n / 3);
  for (auto _ : state) benchmark::DoNotOptimize(ddtw(a, b, {}));
}
BENCHMARK(BM_Ddtw)->Arg(100)->Arg(300);

void BM_Eae(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(6);
  CostMatrix c(n, n);
  for (double& v : c.data()) v = rng.uniform();
  const WarpPath path = dp_align(c).path;
  const GroundTruthPath truth{{{1, 1}, {static_cast<double>(n) / 3, static_cast<double>(n) / 2},
                               {static_cast<double>(n), static_cast<double>(n)}}};
  for (auto _ : state) benchmark::DoNotOptimize(eae(path, truth, n, n));
}
BENCHMARK(BM_Eae)->Arg(100)->Arg(1000);

void BM_BuildSeries(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SubjectTrack track = random_track(7, n);
  const GlobalFeatures global = random_matrix(8, n, 64);
  for (auto _ : state) benchmark::DoNotOptimize(build_series(track, global));
}
BENCHMARK(BM_BuildSeries)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
