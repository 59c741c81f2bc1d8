// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "rpoint/csbm.hpp"
#include "rpoint/estimator.hpp"

using namespace rpoint;

namespace {

void BM_PhiloxStream(benchmark::State& state) {
  ReplicateStream s(1, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxStream);

void BM_SimulateBinary(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const auto d = static_cast<int>(state.range(1));
  const auto model = std::make_shared<const Model>(
      Model{OffspringLaw::binary(), StepKernel::nearest_neighbor(d)});
  std::uint32_t replicate = 0;
  std::uint64_t particles = 0;
  for (auto _ : state) {
    ReplicateStream s(7, n, replicate++);
    const auto traj = simulate(model, n, s);
    for (const auto& c : traj.configurations) particles += c.total_count();
    benchmark::DoNotOptimize(traj.configurations.data());
  }
  state.counters["particles/s"] =
      benchmark::Counter(static_cast<double>(particles), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateBinary)->Args({200, 1})->Args({200, 3})->Args({1000, 1});

void BM_EnsembleMoment(benchmark::State& state) {
  const auto model = std::make_shared<const Model>(
      Model{OffspringLaw::binary(), StepKernel::nearest_neighbor(1)});
  const Ensemble ens(model, ScalingConstants::for_model(*model, 100), 4096, 1.0, 3);
  MomentSpec spec{{0.5, 1.0}, {{1.0}, {-1.0}}};
  for (auto _ : state) benchmark::DoNotOptimize(empirical_moment(ens, spec).value);
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_EnsembleMoment)->Unit(benchmark::kMillisecond);

void BM_MomentFunction(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  MomentSpec spec;
  for (std::size_t i = 0; i < l; ++i) {
    spec.times.push_back(0.5 + 0.25 * static_cast<double>(i));
    spec.frequencies.push_back({0.5 * static_cast<double>(i) - 0.5});
  }
  for (auto _ : state) benchmark::DoNotOptimize(csbm::moment_function(spec));
}
BENCHMARK(BM_MomentFunction)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

void BM_ExactOracle(benchmark::State& state) {
  const auto law = OffspringLaw::geometric();
  const auto kernel = StepKernel::spread_out_box(1, 2);
  const std::uint64_t gens[] = {2, 4, 6};
  const std::vector<std::vector<double>> k{{0.3}, {-0.2}, {0.7}};
  for (auto _ : state) benchmark::DoNotOptimize(exact_small_oracle(law, kernel, gens, k));
}
BENCHMARK(BM_ExactOracle)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
