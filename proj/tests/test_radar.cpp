#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hbid/radar.hpp"
#include "hbid/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hbid;
using std::numbers::pi;

namespace {

RadarConfig small_config() {
  RadarConfig cfg;
  cfg.n_fast = 128;
  return cfg;
}

ScatterTarget still_target(double r, double angle, std::size_t n, double amp = 1.0) {
  ScatterTarget t;
  t.displacement = RealSeries{std::vector<double>(n, 0.0), 100.0};
  t.r0_m = r;
  t.angle_deg = angle;
  t.envelope.assign(n, amp);
  return t;
}

std::size_t argmax_bin(const RangeProfiles& p, std::size_t t, std::size_t m, std::size_t lo = 0,
                       std::size_t hi = 0) {
  if (hi == 0) hi = p.n_bins;
  std::size_t best = lo;
  for (std::size_t k = lo; k < hi; ++k) {
    if (std::abs(p.at(t, m, k)) > std::abs(p.at(t, m, best))) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("radar config") {
  const RadarConfig cfg;
  CHECK(cfg.range_resolution() == doctest::Approx(0.041638).epsilon(1e-4));
  CHECK(cfg.wavelength == doctest::Approx(3.795e-3).epsilon(1e-3));
  cfg.validate();
  RadarConfig bad = cfg;
  bad.element_spacing *= 1.01;
  CHECK_CODE(bad.validate(), ErrorCode::InvalidArgument);
  bad = cfg;
  bad.wavelength *= 1.01;
  CHECK_CODE(bad.validate(), ErrorCode::InvalidArgument);
}

TEST_CASE("range profile of a point target at 1.5 m") {
  const auto cfg = small_config();
  const auto tg = still_target(1.5, 0.0, 4);
  const auto cube = render_cube(std::span(&tg, 1), cfg, 4, INFINITY, 1);
  const auto p = range_profile(cube);
  CHECK(p.n_bins == 128);
  CHECK(p.bin_spacing == doctest::Approx(cfg.range_resolution()));
  const auto expected = static_cast<std::size_t>(std::lround(1.5 / cfg.range_resolution()));
  CHECK(expected == 36);
  for (std::size_t m = 0; m < p.n_elements; ++m) CHECK(argmax_bin(p, 0, m) == expected);
}

TEST_CASE("range profile of a zero cube and degenerate cubes") {
  DataCube cube;
  cube.config = small_config();
  cube.n_slow = 3;
  cube.values.assign(3 * 12 * 128, {0.0f, 0.0f});
  for (const auto& v : range_profile(cube).values) CHECK(v == cdouble(0, 0));

  DataCube tiny = cube;
  tiny.config.n_fast = 1;
  tiny.values.assign(3 * 12, {1.0f, 0.0f});
  CHECK_CODE(range_profile(tiny), ErrorCode::DegenerateCube);
  DataCube wrong = cube;
  wrong.values.pop_back();
  CHECK_CODE(range_profile(wrong), ErrorCode::DegenerateCube);
}

TEST_CASE("two targets give two range peaks") {
  const auto cfg = small_config();
  const std::vector<ScatterTarget> tg{still_target(1.0, 0.0, 2), still_target(2.5, 0.0, 2)};
  const auto p = range_profile(render_cube(tg, cfg, 2, INFINITY, 1));
  const auto b1 = static_cast<std::size_t>(std::lround(1.0 / cfg.range_resolution()));
  const auto b2 = static_cast<std::size_t>(std::lround(2.5 / cfg.range_resolution()));
  CHECK(argmax_bin(p, 0, 0, b1 - 5, b1 + 6) == b1);
  CHECK(argmax_bin(p, 0, 0, b2 - 5, b2 + 6) == b2);
  CHECK(std::abs(p.at(0, 0, b1)) > 5 * std::abs(p.at(0, 0, (b1 + b2) / 2)));
}

TEST_CASE("range FFT preserves per-chirp energy") {
  const auto cfg = small_config();
  const auto tg = still_target(1.7, 12.0, 3);
  const auto cube = render_cube(std::span(&tg, 1), cfg, 3, 5.0, 9);
  const auto p = range_profile(cube);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t m = 0; m < 12; ++m) {
      double e_in = 0, e_out = 0;
      for (std::size_t n = 0; n < 128; ++n) e_in += std::norm(std::complex<double>(cube.values[cube.index(t, m, n)]));
      for (std::size_t k = 0; k < 128; ++k) e_out += std::norm(p.at(t, m, k));
      CHECK(std::abs(e_out - e_in) <= 1e-9 * e_in);
    }
  }
}

TEST_CASE("beamformer direction finding") {
  const auto cfg = small_config();
  const auto grid = angle_grid();
  CHECK(grid.size() == 121);
  for (double angle : {0.0, 20.0, -35.0}) {
    const auto tg = still_target(1.5, angle, 4);
    const auto p = range_profile(render_cube(std::span(&tg, 1), cfg, 4, INFINITY, 1));
    const auto bf = beamform(p, cfg, grid, 30, 43);
    std::size_t best = 0;
    for (std::size_t a = 0; a < bf.n_angles(); ++a) {
      if (bf.power_at(a, 36) > bf.power_at(best, 36)) best = a;
    }
    CHECK(std::abs(bf.angles_deg[best] - angle) <= 1.0);
  }
  CHECK_CODE(beamform(RangeProfiles{{}, 1, 12, 128, 0.04, 100.0}, cfg, {}, 0, 0), ErrorCode::EmptyGrid);
}

TEST_CASE("beamformer coherent gain") {
  const auto cfg = small_config();
  const double angle = 17.0;
  const auto tg = still_target(1.5, angle, 2);
  const auto p = range_profile(render_cube(std::span(&tg, 1), cfg, 2, INFINITY, 1));
  const auto bf = beamform(p, cfg, {angle}, 36, 37);
  const double single = std::norm(p.at(0, 0, 36));
  CHECK(bf.power_at(0, 36) == doctest::Approx(12.0 * single).epsilon(0.05));
  // Plane wave from the steering angle: |sum| = sqrt(M) x single element, exactly.
  const auto s = steered_series(p, bf, 0, 36);
  CHECK(std::abs(std::abs(s.samples[0]) - std::sqrt(12.0) * std::abs(p.at(0, 0, 36))) <=
        1e-9 * std::abs(s.samples[0]));
}

TEST_CASE("echo selection recovers the chest displacement") {
  CohortConfig cc;
  cc.duration = 20.0;
  cc.snr_db = 20.0;
  cc.mode = SignalMode::cube;
  cc.nuisance.random_phase = false;
  const auto prof = default_profiles()[2];
  const auto m = generate_measurement(prof, SessionId{1, false}, 1, cc);
  const auto& cube = std::get<DataCube>(m.signal);
  const auto sel = reconstruct_signal(cube);
  CHECK(sel.range_bin == 36);
  CHECK(sel.angle_deg == 0.0);
  CHECK_FALSE(sel.low_snr);

  // Same seed, noiseless baseband displacement for comparison.
  CohortConfig bb = cc;
  bb.mode = SignalMode::baseband;
  bb.snr_db = INFINITY;
  const auto ref = phase_unwrapped(std::get<ComplexSeries>(generate_measurement(prof, SessionId{1, false}, 1, bb).signal));
  const auto got = phase_unwrapped(sel.signal);
  CHECK(oracle::correlation(got.samples, ref.samples) >= 0.99);
}

TEST_CASE("echo selection with two subjects and a restricted window") {
  const auto cfg = small_config();
  const std::vector<ScatterTarget> tg{still_target(1.2, -25.0, 8), still_target(2.4, 30.0, 8, 2.0)};
  const auto cube = render_cube(tg, cfg, 8, 20.0, 3);
  const auto all = reconstruct_signal(cube);
  CHECK(all.angle_deg == doctest::Approx(30.0).epsilon(0.05));
  const auto near = reconstruct_signal(cube, RangeWindow{0.5, 1.8});
  CHECK(std::abs(near.range_m - 1.2) <= cfg.range_resolution());
  CHECK(std::abs(near.angle_deg + 25.0) <= 1.0);
}

TEST_CASE("noise-only cube is flagged") {
  const auto cfg = small_config();
  const std::vector<ScatterTarget> none;
  const auto cube = render_cube(none, cfg, 20, 0.0, 4);
  const auto sel = reconstruct_signal(cube);
  CHECK(sel.low_snr);
  CHECK(sel.power > 0.0);
}

TEST_CASE("echo selection is invariant to a global complex scale") {
  const auto cfg = small_config();
  const std::vector<ScatterTarget> tg{still_target(1.3, 10.0, 6), still_target(2.0, -40.0, 6, 0.8)};
  const auto cube = render_cube(tg, cfg, 6, 10.0, 5);
  auto scaled = cube;
  const std::complex<float> c(0.3f, -1.7f);
  for (auto& v : scaled.values) v *= c;
  const auto a = reconstruct_signal(cube), b = reconstruct_signal(scaled);
  CHECK(a.range_bin == b.range_bin);
  CHECK(a.angle_index == b.angle_index);
}

TEST_CASE("echo selection errors") {
  const auto cfg = small_config();
  const auto tg = still_target(1.5, 0.0, 2);
  const auto cube = render_cube(std::span(&tg, 1), cfg, 2, INFINITY, 1);
  CHECK_CODE(reconstruct_signal(cube, RangeWindow{20.0, 30.0}), ErrorCode::EmptyWindow);
  const auto p = range_profile(cube);
  const auto bf = beamform(p, cfg, angle_grid(), 30, 40);
  CHECK_CODE(select_echo(p, bf, RangeWindow{3.0, 4.0}), ErrorCode::EmptyWindow);
}

TEST_CASE("beamform serial and parallel agree bit for bit") {
  const auto cfg = small_config();
  const std::vector<ScatterTarget> tg{still_target(1.3, 10.0, 30), still_target(2.0, -40.0, 30, 0.8)};
  const auto p = range_profile(render_cube(tg, cfg, 30, 10.0, 5));
  const auto a = beamform(p, cfg, angle_grid(), 10, 80);
  const auto b = beamform_serial(p, cfg, angle_grid(), 10, 80);
  CHECK(a.power == b.power);
  CHECK(a.weights == b.weights);
}
