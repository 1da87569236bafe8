// Parallel kernels against their serial references. Set OMP_NUM_THREADS to vary the team.

#include <benchmark/benchmark.h>

#include <random>

#include "hbid/embedding.hpp"
#include "hbid/pipeline.hpp"

using namespace hbid;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix m(n, d);
  for (double& v : m.data) v = g(rng);
  return m;
}

const Kernel kRbf{KernelType::rbf, 1.0 / 96.0};

void BM_gram(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 96);
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(x, kRbf));
}
void BM_gram_serial(benchmark::State& state) {
  const auto x = random_matrix(static_cast<std::size_t>(state.range(0)), 96);
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix_serial(x, kRbf));
}
BENCHMARK(BM_gram)->Arg(270)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_serial)->Arg(270)->Arg(1000)->Unit(benchmark::kMillisecond);

RangeProfiles cube_profiles() {
  CohortConfig cfg;
  cfg.duration = 10.0;
  cfg.mode = SignalMode::cube;
  const auto m = generate_measurement(default_profiles()[0], SessionId{}, 1, cfg);
  return range_profile(std::get<DataCube>(m.signal));
}

void BM_beamform(benchmark::State& state) {
  const auto p = cube_profiles();
  const RadarConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(beamform(p, cfg, angle_grid(), 12, 73));
}
void BM_beamform_serial(benchmark::State& state) {
  const auto p = cube_profiles();
  const RadarConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(beamform_serial(p, cfg, angle_grid(), 12, 73));
}
BENCHMARK(BM_beamform)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_beamform_serial)->Unit(benchmark::kMillisecond);

void BM_tsne_gradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = tsne::affinities(random_matrix(n, 20), 30.0);
  const auto y = tsne::initial_layout(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(tsne::gradient(a.joint, y, 1.0));
}
void BM_tsne_gradient_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = tsne::affinities(random_matrix(n, 20), 30.0);
  const auto y = tsne::initial_layout(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(tsne::gradient_serial(a.joint, y, 1.0));
}
BENCHMARK(BM_tsne_gradient)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tsne_gradient_serial)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

std::vector<ComplexSeries> signals() {
  CohortConfig cfg;
  const auto cohort = generate_cohort(default_profiles(), Schedule{1, 2}, cfg);
  std::vector<ComplexSeries> out;
  for (const auto& m : cohort) out.push_back(measurement_signal(m));
  return out;
}

void BM_extract(benchmark::State& state) {
  const auto s = signals();
  for (auto _ : state) benchmark::DoNotOptimize(extract_batch(s, ExtractionConfig{}, FeatureKind::prop));
}
void BM_extract_serial(benchmark::State& state) {
  const auto s = signals();
  for (auto _ : state) benchmark::DoNotOptimize(extract_batch_serial(s, ExtractionConfig{}, FeatureKind::prop));
}
BENCHMARK(BM_extract)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
