// Serial reference kernels against their OpenMP versions.
#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "reloc/lifted.hpp"
#include "reloc/occupation.hpp"

using namespace reloc;

namespace {

LiftedChain chain_for_depth(std::size_t d) {
  const auto t = truncate_law(RelocationLaw::geometric(0.1), 1e-300, d);
  return build_lifted(benchmark_sigma(), t, LiftMode::Lower);
}

std::vector<double> test_vector(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i));
  return x;
}

template <bool Parallel>
void lifted_apply(benchmark::State& state) {
  const auto chain = chain_for_depth(static_cast<std::size_t>(state.range(0)));
  const auto x = test_vector(chain.size());
  std::vector<double> y(x.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      chain.apply_parallel(x, y);
    } else {
      chain.apply(x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(chain.size()));
}

template <bool Parallel>
void occupation_sweep(benchmark::State& state) {
  const OccupationGrid grid(benchmark_sigma(), 0.01, static_cast<std::size_t>(state.range(0)));
  const auto x = test_vector(grid.nodes());
  std::vector<double> y(x.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      grid.sweep_parallel(x, y);
    } else {
      grid.sweep(x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.nodes()));
}

}  // namespace

BENCHMARK(lifted_apply<false>)->Name("lifted_apply/serial")->DenseRange(12, 20, 4);
BENCHMARK(lifted_apply<true>)->Name("lifted_apply/openmp")->DenseRange(12, 20, 4);
BENCHMARK(occupation_sweep<false>)->Name("occupation_sweep/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 18);
BENCHMARK(occupation_sweep<true>)->Name("occupation_sweep/openmp")->RangeMultiplier(8)->Range(1 << 12, 1 << 18);

BENCHMARK_MAIN();
