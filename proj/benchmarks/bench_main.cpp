#include <benchmark/benchmark.h>

#include <random>

#include "phibound/canonical.hpp"
#include "phibound/montecarlo.hpp"
#include "phibound/norms.hpp"
#include "phibound/orlicz.hpp"

using namespace phib;

namespace {

void BM_ConjugateNumeric(benchmark::State& state) {
  const auto phi = OrliczFunction::exp_type();
  double y = 0.0;
  for (auto _ : state) {
    y = y > 5.0 ? 0.1 : y + 0.37;
    benchmark::DoNotOptimize(maximize_conjugate(phi, y).value);
  }
}
BENCHMARK(BM_ConjugateNumeric);

void BM_DoubleConjugate(benchmark::State& state) {
  const auto star = OrliczFunction::power(3.0).numeric_conjugate_function();
  double x = -10.0;
  for (auto _ : state) {
    x = x > 10.0 ? -10.0 : x + 0.01;
    benchmark::DoNotOptimize(maximize_conjugate(star, x).value);
  }
}
BENCHMARK(BM_DoubleConjugate);

void BM_SolveNv(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g;
  CoefficientVector t;
  for (int i = 0; i < state.range(0); ++i) t.entries.push_back(g(gen));
  const auto phi = OrliczFunction::power(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_nv(phi, t, 2.0).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveNv)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_TauNormGrid(benchmark::State& state) {
  const auto model = RandomModel::mixture(0.5, 1.0, 2.0);
  const auto phi = OrliczFunction::quadratic();
  TauSearch search;
  search.grid_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tau_phi_norm(model, phi, search).value);
}
BENCHMARK(BM_TauNormGrid)->Arg(100)->Arg(400)->Arg(1600);

void BM_TauNormEmpirical(benchmark::State& state) {
  const auto samples = sample_canonical(RandomModel::gaussian(1.0), CoefficientVector{{1.0}}, state.range(0), 2);
  const auto phi = OrliczFunction::quadratic();
  for (auto _ : state) benchmark::DoNotOptimize(tau_phi_norm_empirical(samples, phi, {0.01, 1.0}, 100).value);
}
BENCHMARK(BM_TauNormEmpirical)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_GeneralCampaign(benchmark::State& state) {
  CampaignConfig cfg;
  cfg.trials = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(verify_dominance(cfg).summary.violations);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneralCampaign)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
