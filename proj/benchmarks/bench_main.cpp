#include <benchmark/benchmark.h>

#include "morsekit/calculus.hpp"
#include "morsekit/chart.hpp"
#include "morsekit/library.hpp"
#include "morsekit/morsifier.hpp"
#include "morsekit/regions.hpp"

using namespace morsekit;

namespace {

const char* kField = "exp(x1*x2)*(x3^2 - x1)/(1 + x2^2) + x1*x3^3";

Vec point3(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

void BM_TapeValue(benchmark::State& state) {
  const ScalarField f = ScalarField::parse(kField, 3);
  const Vec x = point3(0.3, -0.4, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(f.value(x));
}
BENCHMARK(BM_TapeValue);

void BM_TapeJet(benchmark::State& state) {
  const ScalarField f = ScalarField::parse(kField, 3);
  const Vec x = point3(0.3, -0.4, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(f.jet(x));
}
BENCHMARK(BM_TapeJet);

void BM_ProjectTorus(benchmark::State& state) {
  const ImplicitManifold m = library::torus();
  const Vec x = point3(2.6, 0.7, 1.2);
  for (auto _ : state) benchmark::DoNotOptimize(project_to_manifold(m, x));
}
BENCHMARK(BM_ProjectTorus);

void BM_SampleTorus(benchmark::State& state) {
  const ImplicitManifold m = library::torus();
  for (auto _ : state) benchmark::DoNotOptimize(sample_points(m, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SampleTorus)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ChartHessian(benchmark::State& state) {
  const ImplicitManifold m = library::torus();
  const ScalarField f = ScalarField::parse(kField, 3);
  const Vec x = project_to_manifold(m, point3(2.6, 0.7, 1.2)).coords;
  const Chart c = make_chart({0, 2}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(chart_hessian(f, m, c, x));
}
BENCHMARK(BM_ChartHessian);

void BM_CriticalSearch(benchmark::State& state) {
  const ImplicitManifold m = library::torus();
  const CoverAtlas atlas = build_cover(m, sample_points(m, static_cast<int>(state.range(0))));
  const ScalarField f = ScalarField::parse("x1*x3 + 0.5*x2", 3);
  for (auto _ : state) benchmark::DoNotOptimize(find_critical_points(f, m, atlas));
}
BENCHMARK(BM_CriticalSearch)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_MorsifyCircle(benchmark::State& state) {
  const ImplicitManifold m = library::circle();
  const CoverAtlas atlas = build_cover(m, sample_points(m, 64));
  const FineCover cover = build_fine_cover(m, atlas, 1e-4);
  const ScalarField f = ScalarField::parse("x2^3", 2);
  for (auto _ : state) benchmark::DoNotOptimize(morsify(f, m, atlas, cover, 0.01, 1));
}
BENCHMARK(BM_MorsifyCircle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
