#include "railyard/limitshape.hpp"
#include "railyard/piecewise.hpp"
#include "railyard/schur_process.hpp"

#include <benchmark/benchmark.h>

using namespace railyard;

namespace {

RailYardSpec four_column() { return build(1, 4, "LRRL", "++--", {0.3, 0.2, 0.4, 0.5}); }
AsymptoticModel staircase() { return AsymptoticModel::single("LRL", "-++", {1.0 / 3, 0.5, 1.0}); }

void BM_TransferPartitionFunction(benchmark::State& state) {
  const auto s = four_column();
  const int cap = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(partition_function_transfer(s, {}, cap));
}
BENCHMARK(BM_TransferPartitionFunction)->Arg(10)->Arg(20)->Arg(40);

void BM_TransferSampler(benchmark::State& state) {
  const TransferSampler sampler(four_column(), {}, 30);
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = draw_rng(5, i++);
    benchmark::DoNotOptimize(sampler.draw_sequence(rng));
  }
}
BENCHMARK(BM_TransferSampler);

// One shuffle draw on the realized staircase graph with N = range(0).
void BM_ShuffleSampler(benchmark::State& state) {
  const auto spec = realize(staircase(), static_cast<int>(state.range(0)));
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = draw_rng(6, i++);
    benchmark::DoNotOptimize(sample_shuffle_sequence(spec, rng));
  }
}
BENCHMARK(BM_ShuffleSampler)->Arg(20)->Arg(40)->Arg(80);

void BM_ContourMoment(benchmark::State& state) {
  const auto m = staircase();
  const auto o = observe(m, 0.5);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(moment(m, o, 1, k));
}
BENCHMARK(BM_ContourMoment)->Arg(1)->Arg(3);

void BM_Density(benchmark::State& state) {
  const auto m = staircase();
  const auto o = observe(m, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(density(m, o, static_cast<int>(state.range(0)), 0.2));
}
BENCHMARK(BM_Density)->Arg(1)->Arg(2);

void BM_CosetSchurFull(benchmark::State& state) {
  const std::vector<double> x{2.0, 2.0, 1.1, 1.1, 0.4, 0.4};
  const Partition lam{4, 3, 2, 1};
  for (auto _ : state) benchmark::DoNotOptimize(coset_schur(lam, x, {}, CosetMode::Full));
}
BENCHMARK(BM_CosetSchurFull);

} // namespace
BENCHMARK_MAIN();
