#include <benchmark/benchmark.h>

#include "chns/harness.hpp"
#include "chns/msav_second.hpp"

namespace {

using namespace chns;

void BM_FirstOrderStep(benchmark::State& state) {
  const PhysParams prm;
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const SchemeState s0 = swirl_initial_state(g, prm);
  for (auto _ : state) benchmark::DoNotOptimize(step_first_order(s0, prm, 1e-3));
  state.SetItemsProcessed(state.iterations() * g.nx * g.ny);
}
BENCHMARK(BM_FirstOrderStep)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

void BM_SecondOrderStep(benchmark::State& state) {
  const PhysParams prm;
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const SchemeState2 s1 = bootstrap(swirl_initial_state(g, prm), prm, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(step_second_order(s1, prm, 1e-3));
  state.SetItemsProcessed(state.iterations() * g.nx * g.ny);
}
BENCHMARK(BM_SecondOrderStep)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

void BM_SecondOrderEnergyReport(benchmark::State& state) {
  const PhysParams prm;
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const SchemeState2 s1 = bootstrap(swirl_initial_state(g, prm), prm, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(energy2_report(s1, prm, 1e-3));
}
BENCHMARK(BM_SecondOrderEnergyReport)->RangeMultiplier(2)->Range(32, 256);

}  // namespace
BENCHMARK_MAIN();
