#include <benchmark/benchmark.h>

#include <random>

#include "iedd/benchmark_models.hpp"
#include "iedd/decomposition.hpp"
#include "iedd/greens.hpp"
#include "iedd/operators.hpp"
#include "iedd/sources.hpp"

using namespace iedd;

namespace {

const Background kBg = Background::from_frequency(0.1, 24000.0);

ComplexVectorField random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(3 * g.cell_count());
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return ComplexVectorField(g, std::move(v));
}

void BM_KernelAssembly(benchmark::State& state) {
  const auto n = state.range(0);
  const Grid g({n, n, n}, {0.25, 0.25, 0.25});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_electric_kernel(g, kBg));
}
BENCHMARK(BM_KernelAssembly)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Convolve(benchmark::State& state) {
  const auto n = state.range(0);
  const Grid g({n, n, n}, {0.25, 0.25, 0.25});
  const GreenKernel k = assemble_electric_kernel(g, kBg);
  const ComplexVectorField s = random_field(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(k, s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cell_count()));
}
BENCHMARK(BM_Convolve)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_SystemMatvec(benchmark::State& state) {
  const BenchmarkModel bm = build_benchmark_model(BenchmarkName::TwoBlocks, state.range(0) / 128.0);
  const Background bg = Background::from_frequency(bm.model.sigma0(), bm.frequency);
  const SystemOperator op(bm.model, bg);
  const ComplexVectorField E = random_field(bm.model.grid(), 2);
  std::vector<cplx> out(E.values().size());
  for (auto _ : state) {
    op.apply_masked(E.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_SystemMatvec)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ScatterApply(benchmark::State& state) {
  const auto n = state.range(0);
  const Grid g({n, n, 2 * n}, {0.25, 0.25, 0.25});
  const IndexBox lower{{0, 0, 0}, {n, n, n}}, upper{{0, 0, n}, {n, n, 2 * n}};
  const ScatterKernel k(g, upper, lower, kBg);
  const ComplexVectorField s = random_field(g.sub_grid(lower), 3);
  std::vector<cplx> out(3 * upper.cell_count());
  for (auto _ : state) {
    k.apply(s.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ScatterApply)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SolveTwoBlocks(benchmark::State& state) {
  const BenchmarkModel bm = build_benchmark_model(BenchmarkName::TwoBlocks, 0.125);
  const Background bg = Background::from_frequency(bm.model.sigma0(), bm.frequency);
  const ComplexVectorField E0 =
      background_E_on_grid({bm.source_position, bm.source_moment, bm.frequency}, bm.model.grid(), bg);
  DecompositionPlan plan;
  plan.boxes = bm.boxes;
  plan.scheme = static_cast<Scheme>(state.range(0));
  auto kernels = std::make_shared<KernelRepository>();
  for (auto _ : state) benchmark::DoNotOptimize(solve_dd(bm.model, bg, plan, E0, {}, kernels));
  state.SetLabel(to_string(plan.scheme));
}
BENCHMARK(BM_SolveTwoBlocks)
    ->Arg(static_cast<int>(Scheme::FullDomain))
    ->Arg(static_cast<int>(Scheme::GsFixed))
    ->Arg(static_cast<int>(Scheme::GsAdaptive))
    ->Arg(static_cast<int>(Scheme::JacobiAdaptive))
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
