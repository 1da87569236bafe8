#include <doctest.h>

#include <random>

#include "hbid/embedding.hpp"
#include "hbid/pipeline.hpp"

using namespace hbid;

// Each parallel kernel must reproduce its serial reference bit for bit.

TEST_CASE("extract_batch matches the serial loop") {
  CohortConfig cfg;
  cfg.duration = 10.0;
  const auto cohort = generate_cohort(default_profiles(), Schedule{1, 1}, cfg);
  std::vector<ComplexSeries> signals;
  for (const auto& m : cohort) signals.push_back(measurement_signal(m));
  for (auto kind : {FeatureKind::amp, FeatureKind::comp, FeatureKind::prop}) {
    const auto a = extract_batch(signals, ExtractionConfig{}, kind);
    const auto b = extract_batch_serial(signals, ExtractionConfig{}, kind);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
  }
}

TEST_CASE("gram matrix matches the serial loop") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix x(97, 13);
  for (double& v : x.data) v = g(rng);
  for (const Kernel k : {Kernel{KernelType::linear, 0.0}, Kernel{KernelType::rbf, 0.07}}) {
    CHECK(gram_matrix(x, k).data == gram_matrix_serial(x, k).data);
  }
}

TEST_CASE("beamforming matches the serial loop") {
  CohortConfig cfg;
  cfg.duration = 4.0;
  cfg.mode = SignalMode::cube;
  cfg.angle_deg = 15.0;
  const auto m = generate_measurement(default_profiles()[0], SessionId{}, 1, cfg);
  const auto& cube = std::get<DataCube>(m.signal);
  const auto profiles = range_profile(cube);
  const auto a = beamform(profiles, cube.config, angle_grid(), 10, 80);
  const auto b = beamform_serial(profiles, cube.config, angle_grid(), 10, 80);
  CHECK(a.power == b.power);
  CHECK(a.weights == b.weights);
}

TEST_CASE("t-SNE gradient matches the serial loop") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Matrix x(60, 5);
  for (double& v : x.data) v = g(rng);
  const auto a = tsne::affinities(x, 10.0);
  const auto y = tsne::initial_layout(60, 3);
  CHECK(tsne::gradient(a.joint, y, 12.0).data == tsne::gradient_serial(a.joint, y, 12.0).data);
}
