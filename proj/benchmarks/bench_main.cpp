#include <benchmark/benchmark.h>

#include <map>

#include "bagcv/bagcv.hpp"

using namespace bagcv;

namespace {

const Sample& normal_sample(std::size_t n) {
  static std::map<std::size_t, Sample> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, mixture_sample(preset(Preset::std_normal), n, 1)).first;
  return it->second;
}

void BM_CvScore(benchmark::State& state) {
  const Sample& x = normal_sample(static_cast<std::size_t>(state.range(0)));
  const double h = default_cv_interval(x).hi / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(cv_score(x, h));
  const double n = static_cast<double>(x.size());
  state.counters["pairs/s"] = benchmark::Counter(n * (n - 1) / 2, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_CvScore)->Arg(1000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_CvMinimize(benchmark::State& state) {
  const Sample& x = normal_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cv_minimize(x).h_opt);
}
BENCHMARK(BM_CvMinimize)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_DistanceWeights(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const BinnedSample b = bin_sample(normal_sample(n), n);
  for (auto _ : state) benchmark::DoNotOptimize(distance_class_weights(b, n - 1, 1).data());
}
BENCHMARK(BM_DistanceWeights)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_BinnedMinimize(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const BinnedSample b = bin_sample(normal_sample(n), n);
  for (auto _ : state) benchmark::DoNotOptimize(cv_minimize_binned(b, std::nullopt, 1).h_opt);
}
BENCHMARK(BM_BinnedMinimize)->Arg(1000)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_Bagged(benchmark::State& state) {
  const Sample& x = normal_sample(100'000);
  BagConfig cfg;
  cfg.m = static_cast<std::size_t>(state.range(0));
  cfg.n_resamples = 100;
  cfg.seed = 3;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bagged_bandwidth(x, cfg).h_bag);
}
BENCHMARK(BM_Bagged)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SubsampleIndices(benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(subsample_indices(1'000'000, 1000, 4, i++).data());
}
BENCHMARK(BM_SubsampleIndices);

void BM_FitMixture(benchmark::State& state) {
  const Sample x = mixture_sample(preset(Preset::D1), static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(fit_mixture_bic(x, 6).k);
}
BENCHMARK(BM_FitMixture)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MinimizeAmse(benchmark::State& state) {
  const AmseModel model = amse_model(functionals_mixture(preset(Preset::D1)), gaussian_constants(), 100'000, 500);
  const AmseInputs in = model.inputs();
  for (auto _ : state) benchmark::DoNotOptimize(minimize_amse(in).m);
}
BENCHMARK(BM_MinimizeAmse);

}  // namespace

BENCHMARK_MAIN();
