#include <benchmark/benchmark.h>

#include <vector>

#include "biphase/kernels.hpp"

namespace {

using namespace biphase;

const std::vector<ModeTerm> kTerms{{{1}, {0.6, 0.0}}, {{-2}, {0.0, 0.4}}};

GridSpec grid_for(const benchmark::State& state) {
  return {static_cast<int>(state.range(0)), 8.0};
}

template <bool Parallel>
void BM_Sample(benchmark::State& state) {
  const auto grid = grid_for(state);
  std::vector<cplx> out(static_cast<std::size_t>(grid.side) * grid.side);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::sample_superposition(kTerms, BeamGeometry{}, grid, out);
    else
      kernels::serial::sample_superposition(kTerms, BeamGeometry{}, grid, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(out.size()));
}

template <bool Parallel>
void BM_Inner(benchmark::State& state) {
  const auto grid = grid_for(state);
  std::vector<cplx> a(static_cast<std::size_t>(grid.side) * grid.side);
  kernels::serial::sample_superposition(kTerms, BeamGeometry{}, grid, a);
  for (auto _ : state) {
    cplx v = Parallel ? kernels::parallel::inner_product(a, a) : kernels::serial::inner_product(a, a);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(a.size()));
}

template <bool Parallel>
void BM_Render(benchmark::State& state) {
  const auto grid = grid_for(state);
  const auto n = static_cast<std::size_t>(grid.side) * grid.side;
  std::vector<cplx> field(n);
  kernels::serial::sample_superposition(kTerms, BeamGeometry{}, grid, field);
  const double peak = kernels::serial::peak_modulus(field);
  std::vector<double> phase(n), env(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::parallel::render_blazed(field, grid.side, 16, peak, phase, env);
    else
      kernels::serial::render_blazed(field, grid.side, 16, peak, phase, env);
    benchmark::DoNotOptimize(phase.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

}  // namespace

BENCHMARK(BM_Sample<false>)->Arg(256)->Arg(1080)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sample<true>)->Arg(256)->Arg(1080)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Inner<false>)->Arg(256)->Arg(1080)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Inner<true>)->Arg(256)->Arg(1080)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Render<false>)->Arg(256)->Arg(1080)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Render<true>)->Arg(256)->Arg(1080)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
