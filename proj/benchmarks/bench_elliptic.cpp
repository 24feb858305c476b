#include <benchmark/benchmark.h>

#include <cmath>

#include "chns/elliptic.hpp"
#include "chns/msav_first.hpp"

namespace {

using namespace chns;

CellField smooth_rhs(const GridSpec& g) {
  CellField f = CellField::sample(g, [](double x, double y) { return std::cos(3.0 * x) * std::sin(2.0 * y + 0.3); });
  const double m = f.mean();
  for (double& v : f.values()) v -= m;
  return f;
}

void BM_PoissonTransform(benchmark::State& state) {
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const CellField rhs = smooth_rhs(g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_neumann_poisson(rhs, 1e-12, CellSolverPath::Transform));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_PoissonTransform)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNLogN);

void BM_PoissonIterative(benchmark::State& state) {
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const CellField rhs = smooth_rhs(g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_neumann_poisson(rhs, 1e-10, CellSolverPath::Iterative));
}
BENCHMARK(BM_PoissonIterative)->RangeMultiplier(2)->Range(32, 128);

void BM_ChSystem(benchmark::State& state) {
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const PhysParams prm;
  const ChOperatorSpec op{prm.mobility * 1e-3, prm.gamma_eff()};
  const CellField rhs = smooth_rhs(g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ch_system(op, rhs, 1e-12));
}
BENCHMARK(BM_ChSystem)->RangeMultiplier(2)->Range(32, 256);

void BM_VelocityHelmholtz(benchmark::State& state) {
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const MacVector rhs = MacVector::sample(
      g, [](double x, double y) { return std::sin(x) * y; }, [](double x, double y) { return x * std::cos(y); });
  const HelmholtzSpec op{1e-3 * 1e-3};
  for (auto _ : state) benchmark::DoNotOptimize(solve_velocity_helmholtz(op, rhs, 1e-11));
}
BENCHMARK(BM_VelocityHelmholtz)->RangeMultiplier(2)->Range(32, 256);

void BM_Projection(benchmark::State& state) {
  const GridSpec g = GridSpec::unit_square(state.range(0), state.range(0));
  const MacVector w = MacVector::sample(
      g, [](double x, double y) { return std::sin(3 * x) * y; }, [](double x, double y) { return x * x * std::cos(y); });
  for (auto _ : state) benchmark::DoNotOptimize(project(w, 1e-3, 1e-12));
}
BENCHMARK(BM_Projection)->RangeMultiplier(2)->Range(32, 256);

}  // namespace
