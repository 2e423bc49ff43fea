#include <benchmark/benchmark.h>

#include <random>

#include "maslov/maslov.hpp"

using namespace maslov;

namespace {

ComplexMatrix random_skew(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {dist(rng), dist(rng)};
  return 0.5 * (m - m.adjoint());
}

UnitarySymmetric kdv7_start(double lambda) {
  const auto field = kdv7_field();
  return cayley_from_frame(
      farfield_frame(field.far_minus(lambda), Side::unstable, kDefaultTolerances, CenterPolicy::complete));
}

}  // namespace

static void BM_MatExp(benchmark::State& state) {
  const ComplexMatrix m = random_skew(state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(mat_exp(m));
}
BENCHMARK(BM_MatExp)->Arg(1)->Arg(3)->Arg(6)->Arg(12);

static void BM_EmkStep(benchmark::State& state) {
  const auto field = kdv7_field();
  const auto u = kdv7_start(0.15);
  UnitaryOptions options;
  options.scheme = state.range(0) == 0 ? UnitaryScheme::euler : UnitaryScheme::midpoint;
  for (auto _ : state) benchmark::DoNotOptimize(emk_step(u, 0.3, 0.01, field, 0.15, options));
}
BENCHMARK(BM_EmkStep)->Arg(0)->Arg(1);

static void BM_IntegrateChart(benchmark::State& state) {
  const auto field = kdv7_field();
  const auto frame = farfield_frame(field.far_minus(-0.2), Side::unstable);
  const auto s0 = chart_from_frame(frame);
  const auto grid = uniform_grid(-20.0, 20.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_chart(field, -0.2, grid, s0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntegrateChart)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_IntegrateUnitary(benchmark::State& state) {
  const auto field = kdv7_field();
  const auto u0 = kdv7_start(-0.2);
  const auto grid = uniform_grid(-20.0, 20.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_unitary(field, -0.2, grid, u0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntegrateUnitary)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

// One sweep row, both backends, default x grid.
static void BM_EvaluateLambda(benchmark::State& state) {
  const auto field = kdv7_field();
  const auto grid = uniform_grid(-20.0, 20.0, 4000);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_lambda(field, -0.1, grid));
}
BENCHMARK(BM_EvaluateLambda)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
