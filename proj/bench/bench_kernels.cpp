// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include "mtorus/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace mtorus;

namespace {

Exec policy_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st, std::size_t n) {
  st.SetLabel(st.range(0) ? "parallel" : "serial");
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * n));
}

void BM_Homothety(benchmark::State& st) {
  const auto a = validate_toral_matrix({2, 1, 1, 1});
  const auto m = model_metric();
  const auto pts = sample_points(0, 20000);
  for (auto _ : st) benchmark::DoNotOptimize(homothety_residuals(a, m, pts, policy_of(st)));
  label(st, pts.size());
}

void BM_Compatibility(benchmark::State& st) {
  const auto m = model_metric();
  const auto pts = sample_points(0, 20000);
  for (auto _ : st) benchmark::DoNotOptimize(compatibility_residuals(m, pts, {}, policy_of(st)));
  label(st, pts.size());
}

void BM_Curvature(benchmark::State& st) {
  const auto m = model_metric();
  const auto pts = sample_points(0, 5000);
  for (auto _ : st) benchmark::DoNotOptimize(curvature_samples(m, pts, policy_of(st)));
  label(st, pts.size());
}

void BM_Conformal(benchmark::State& st) {
  const auto m = model_metric();
  const auto gq = quotient_conformal_metric(m);
  const auto pts = sample_points(0, 20000);
  const auto dirs = sample_directions(0, pts.size());
  for (auto _ : st) benchmark::DoNotOptimize(conformal_samples(m, gq, pts, dirs, policy_of(st)));
  label(st, pts.size());
}

void BM_TransportIsometry(benchmark::State& st) {
  const auto m = model_metric();
  const auto curves = sample_curves(0, 200);
  for (auto _ : st) benchmark::DoNotOptimize(transport_isometry_defects(m, curves, {}, policy_of(st)));
  label(st, curves.size());
}

void BM_EnergyDrift(benchmark::State& st) {
  const auto m = model_metric();
  const auto pts = sample_points(1, 200, SampleBox{-2, 2, -2, 2, 0.5, 5});
  const auto dirs = sample_directions(1, pts.size());
  std::vector<TangentVector> seeds;
  for (std::size_t i = 0; i < pts.size(); ++i) seeds.emplace_back(pts[i], dirs[i]);
  for (auto _ : st) benchmark::DoNotOptimize(energy_drifts(m, seeds, 5.0, {}, policy_of(st)));
  label(st, seeds.size());
}

}  // namespace

BENCHMARK(BM_Homothety)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Compatibility)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Curvature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conformal)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransportIsometry)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyDrift)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
