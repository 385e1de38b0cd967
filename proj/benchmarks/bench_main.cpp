#include <benchmark/benchmark.h>

#include "mixsat/ensemble.hpp"
#include "mixsat/motif.hpp"
#include "mixsat/snip.hpp"
#include "mixsat/solver.hpp"
#include "mixsat/theory.hpp"

using namespace mixsat;

namespace {

EnsembleParams params(std::int64_t n, double alpha, double beta, std::uint64_t seed = 1) {
  EnsembleParams p;
  p.n_qubits = static_cast<std::uint32_t>(n);
  p.clause_density = alpha;
  p.quantum_fraction = beta;
  p.graph_model = GraphModel::GNM;
  p.seed = seed;
  return p;
}

void BM_Generate(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_instance(params(state.range(0), 0.6, 0.5, ++seed)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->RangeMultiplier(4)->Range(256, 16384);

void BM_SnipCore(benchmark::State& state) {
  const auto inst = generate_instance(params(state.range(0), 0.6, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(snip_core(inst));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SnipCore)->RangeMultiplier(4)->Range(256, 16384);

void BM_SolveNearBoundary(benchmark::State& state) {
  const double beta = state.range(1) / 4.0;
  const auto inst = generate_instance(params(state.range(0), critical_density(beta), beta));
  for (auto _ : state) benchmark::DoNotOptimize(solve(inst));
}
BENCHMARK(BM_SolveNearBoundary)->ArgsProduct({{500, 2000, 8000}, {0, 2, 4}});

void BM_Census(benchmark::State& state) {
  const auto core = snip_core(generate_instance(params(state.range(0), 0.55, 0.5))).core;
  for (auto _ : state) benchmark::DoNotOptimize(motif_census(core));
}
BENCHMARK(BM_Census)->Arg(2000)->Arg(8000);

void BM_KernelDimension(benchmark::State& state) {
  const auto inst = generate_instance(params(state.range(0), 0.9, 1.0, 3));
  for (auto _ : state) benchmark::DoNotOptimize(exact_kernel_dimension(inst));
}
BENCHMARK(BM_KernelDimension)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

void BM_LoopProbability(benchmark::State& state) {
  const auto method = state.range(0) ? LoopMethod::Enumerate : LoopMethod::Transfer;
  for (auto _ : state) benchmark::DoNotOptimize(p_loop_unsnippable(12, 0.4, method));
}
BENCHMARK(BM_LoopProbability)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
