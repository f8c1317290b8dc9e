#include <benchmark/benchmark.h>

#include "sft/field.hpp"
#include "sft/metrics.hpp"
#include "sft/pipeline.hpp"

using namespace sft;

namespace {

const Pipeline& reference() {
  static const Pipeline p(load_scene(SFT_BENCH_SCENE));
  return p;
}

}  // namespace

static void BM_RecordScene(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference().record(1000.0));
}
BENCHMARK(BM_RecordScene);

static void BM_BuildMatrix(benchmark::State& state) {
  const auto model = state.range(0) == 0 ? SourceModel::planewave : SourceModel::mixedwave;
  const auto dist = reference().distribution(model);
  const double k = reference().scene().wavenumber(1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(build_matrix(*dist, k, 4));
}
BENCHMARK(BM_BuildMatrix)->Arg(0)->Arg(1)->ArgNames({"mixedwave"});

// One method per argument: pw-cf, pw-irls, mw-cf, mw-irls.
static void BM_Expand(benchmark::State& state) {
  const Method m = std::vector{Method::pw_cf, Method::pw_irls, Method::mw_cf, Method::mw_irls}[state.range(0)];
  const auto alpha = reference().record(1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(reference().expand(m, alpha, 1000.0));
  state.SetLabel(to_string(m));
}
BENCHMARK(BM_Expand)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

static void BM_FieldGrid(benchmark::State& state) {
  const auto prepared = reference().prepare(Method::mw_cf, 1000.0);
  const auto field = reference().evaluator(prepared);
  FieldGridSpec spec;
  spec.resolution = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(compute_field_grid(*field, spec, "mw-cf", 1000.0));
}
BENCHMARK(BM_FieldGrid)->Unit(benchmark::kMillisecond);

static void BM_SphereAverage(benchmark::State& state) {
  const auto truth = reference().evaluator(reference().prepare(Method::reference, 1000.0));
  const auto test = reference().evaluator(reference().prepare(Method::pw_cf, 1000.0));
  for (auto _ : state) benchmark::DoNotOptimize(sphere_average(Metric::ide, 0.3, *truth, *test));
}
BENCHMARK(BM_SphereAverage);

static void BM_AuralizeMw(benchmark::State& state) {
  const auto prepared = reference().prepare(Method::mw_cf, 1000.0);
  const auto ears = reference().ears();
  for (auto _ : state) benchmark::DoNotOptimize(prepared.auralize(reference().scene(), {0.0, 0.5, 0.0}, ears));
}
BENCHMARK(BM_AuralizeMw);

BENCHMARK_MAIN();
