#include "sphrad/directions.hpp"
#include "sphrad/energy.hpp"
#include "sphrad/fixtures.hpp"
#include "sphrad/gaussian.hpp"
#include "sphrad/probability.hpp"

#include <benchmark/benchmark.h>

using namespace sphrad;

static void BM_SampleSphere(benchmark::State& state) {
  const auto method = state.range(1) ? SamplingMethod::Qmc : SamplingMethod::MonteCarlo;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_sphere(state.range(0), 10000, 1, method));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleSphere)->Args({8, 0})->Args({8, 1})->Unit(benchmark::kMicrosecond);

static void BM_HalfspaceValue(benchmark::State& state) {
  const Index m = 8;
  const auto sys = make_halfspace(Vector::Unit(m, 0));
  const auto model = standard_model(m);
  const auto dirs = sample_sphere(m, state.range(0), 1, SamplingMethod::Qmc);
  const Vector x = Vector::Constant(1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(prob_value(*sys, x, model, dirs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HalfspaceValue)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_EnergyGradient(benchmark::State& state) {
  const EnergyParams params;
  const auto sys = make_energy_system(params);
  const auto model = build_energy_covariance(params);
  const auto dirs = sample_sphere(params.x_dim(), 10000, 1, SamplingMethod::Qmc);
  Vector x(params.x_dim());
  x << 0.33, 0.35, 0.35, 0.31, 11.25, 11.13, 11.13, 11.26;
  EvalOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(prob_gradient(*sys, x, model, dirs, opts));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_EnergyGradient)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_HyperbolaProjection(benchmark::State& state) {
  const auto dirs = sample_sphere(2, 4096, 3, SamplingMethod::MonteCarlo);
  Index k = 0;
  for (auto _ : state) {
    const Vector w = 3.0 * dirs.direction(k);
    benchmark::DoNotOptimize(detail::project_onto_hyperbola(1.5, w));
    k = (k + 1) % dirs.size();
  }
}
BENCHMARK(BM_HyperbolaProjection);
BENCHMARK_MAIN();
