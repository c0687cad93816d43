#include <benchmark/benchmark.h>

#include "fpp/passage.hpp"
#include "fpp/tau.hpp"
#include "fpp/weights.hpp"

using namespace fpp;

namespace {

const DistributionSpec kExp = DistributionSpec::exponential(1.0);

void BM_SampleConfiguration(benchmark::State& state) {
  const long n = state.range(0);
  const Region r = line_window(2, n, static_cast<int>(n), static_cast<int>(n));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_configuration(r, kExp, seed++));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(r.num_edges()));
}
BENCHMARK(BM_SampleConfiguration)->Arg(32)->Arg(64)->Arg(128);

void BM_PointToPoint(benchmark::State& state) {
  const long n = state.range(0);
  const Region r = line_window(2, n, static_cast<int>(n), static_cast<int>(4 * n));
  const WeightField f = sample_configuration(r, kExp, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(a_0n(f, n).time);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(r.num_vertices()));
}
BENCHMARK(BM_PointToPoint)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FaceToFace(benchmark::State& state) {
  const long n = state.range(0);
  const Region r = line_window(2, n, static_cast<int>(n), static_cast<int>(4 * n));
  const WeightField f = sample_configuration(r, kExp, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi(f, 0, n).time);
  }
}
BENCHMARK(BM_FaceToFace)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TauTransform(benchmark::State& state) {
  const long n = state.range(0);
  const Region r = line_window(2, n, static_cast<int>(n), static_cast<int>(n));
  const WeightField f = sample_configuration(r, DistributionSpec::bernoulli(0.01, 7.0, 0.45), 11);
  TauParams p;
  p.n = n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tau_transform(f, p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(r.num_edges()));
}
BENCHMARK(BM_TauTransform)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_BallGrowth(benchmark::State& state) {
  BoxGeometry g;
  g.n = state.range(0);
  g.pad = static_cast<int>(g.n);
  g.transverse = static_cast<int>(g.n);
  const Region r = g.window();
  const BoxPair boxes = g.boxes(r);
  TauParams p;
  p.n = g.n;
  const TauField tf = tau_transform(sample_configuration(r, kExp, 13), p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ball_growth(tf, boxes.source, boxes.target, 1000).k_star());
  }
}
BENCHMARK(BM_BallGrowth)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
