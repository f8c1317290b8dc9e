#include <benchmark/benchmark.h>

#include <random>

#include "sft/capture.hpp"
#include "sft/harmonics.hpp"
#include "sft/special.hpp"
#include "sft/stft.hpp"

using namespace sft;

static void BM_SphHarmAll(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const Direction dir{0.7, 2.1};
  for (auto _ : state) benchmark::DoNotOptimize(sph_harm_all(order, dir));
}
BENCHMARK(BM_SphHarmAll)->Arg(4)->Arg(12)->Arg(40);

static void BM_BesselArray(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sph_bessel_j_array(order, 7.3));
}
BENCHMARK(BM_BesselArray)->Arg(4)->Arg(12)->Arg(40);

static void BM_HankelArray(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sph_hankel1_array(order, 36.6));
}
BENCHMARK(BM_HankelArray)->Arg(4)->Arg(12);

static void BM_AnalyticSourceCoefficients(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analytic_source_coefficients({1.0, 0.0, 0.0}, 18.3, order));
}
BENCHMARK(BM_AnalyticSourceCoefficients)->Arg(4)->Arg(12);

static void BM_StftAnalyze(benchmark::State& state) {
  const Stft stft(4096, 2048);
  std::mt19937 gen(7);
  std::normal_distribution<double> g;
  std::vector<double> x(16000);
  for (auto& v : x) v = g(gen);
  for (auto _ : state) benchmark::DoNotOptimize(stft.analyze(x));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_StftAnalyze);
