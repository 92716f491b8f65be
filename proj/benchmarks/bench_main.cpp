#include <benchmark/benchmark.h>

#include <vector>

#include "hoqmc/generator_matrices.hpp"
#include "hoqmc/net_quality.hpp"
#include "hoqmc/point_engine.hpp"
#include "hoqmc/sobolev.hpp"
#include "hoqmc/walsh.hpp"

using namespace hoqmc;

static void BM_InterlacedMatrices(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(interlaced_niederreiter(2, 3, 2, m));
}
BENCHMARK(BM_InterlacedMatrices)->Arg(8)->Arg(16);

static void BM_NetPoints(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto M = interlaced_niederreiter(2, 3, 2, m);
  for (auto _ : state) benchmark::DoNotOptimize(net_points(M, m));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << m));
}
BENCHMARK(BM_NetPoints)->Arg(10)->Arg(14);

static void BM_WorstCaseError(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto M = interlaced_niederreiter(2, 3, 1, m);
  const auto points = net_points(M, m);
  const KernelSpec spec{1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(wce(spec, points));
  state.SetComplexityN(std::int64_t{1} << m);
}
BENCHMARK(BM_WorstCaseError)->DenseRange(6, 10, 2)->Complexity(benchmark::oNSquared);

static void BM_Certify(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto M = interlaced_niederreiter(2, 2, 2, m);
  const int t = t_value_bound(2, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(certify_order_t(M, 2, m, 2, t));
}
BENCHMARK(BM_Certify)->Arg(6)->Arg(8);

static void BM_WalshTable(benchmark::State& state) {
  const int levels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_walsh_table(2, 1, levels));
}
BENCHMARK(BM_WalshTable)->Arg(3)->Arg(5);

static void BM_KhatChain(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(khat(3, 2, 200, 117));
}
BENCHMARK(BM_KhatChain);

BENCHMARK_MAIN();
