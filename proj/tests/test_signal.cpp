#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hbid/fft.hpp"
#include "hbid/signal.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hbid;
using std::numbers::pi;

namespace {

RealSeries sampled(double fs, std::size_t n, auto&& fn) {
  RealSeries x{std::vector<double>(n), fs};
  for (std::size_t i = 0; i < n; ++i) x.samples[i] = fn(static_cast<double>(i) / fs);
  return x;
}

ComplexSeries csampled(double fs, std::size_t n, auto&& fn) {
  ComplexSeries x{std::vector<cdouble>(n), fs, 0.0};
  for (std::size_t i = 0; i < n; ++i) x.samples[i] = fn(static_cast<double>(i) / fs);
  return x;
}

}  // namespace

TEST_CASE("second derivative of t^2 is 2") {
  const auto x = sampled(100.0, 50, [](double t) { return t * t; });
  const auto y = second_derivative(x);
  REQUIRE(y.size() == 48);
  CHECK(y.fs == 100.0);
  for (double v : y.samples) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("second derivative of constant and short series") {
  const auto y = second_derivative(RealSeries{std::vector<double>(10, 3.5), 100.0});
  for (double v : y.samples) CHECK(v == 0.0);
  CHECK_CODE(second_derivative(RealSeries{{1.0, 2.0}, 100.0}), ErrorCode::SeriesTooShort);
}

TEST_CASE("second derivative of a sinusoid") {
  const double w = 2 * pi * 1.2;
  const auto x = sampled(100.0, 1000, [&](double t) { return std::sin(w * t); });
  const auto y = second_derivative(x);
  double err = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i + 1) / 100.0;
    err = std::max(err, std::abs(y.samples[i] + w * w * std::sin(w * t)));
  }
  CHECK(err / (w * w) <= 1e-2);
}

TEST_CASE("second derivative is linear") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  RealSeries a{std::vector<double>(200), 100.0}, b = a, c = a;
  for (std::size_t i = 0; i < 200; ++i) {
    a.samples[i] = g(rng);
    b.samples[i] = g(rng);
    c.samples[i] = 2.5 * a.samples[i] - 0.75 * b.samples[i];
  }
  const auto da = second_derivative(a), db = second_derivative(b), dc = second_derivative(c);
  double scale = 0;
  for (double v : dc.samples) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < dc.size(); ++i) {
    CHECK(std::abs(dc.samples[i] - (2.5 * da.samples[i] - 0.75 * db.samples[i])) <= 1e-12 * scale);
  }
}

TEST_CASE("complex second derivative") {
  const double f = 1.5;
  const auto s = csampled(100.0, 300, [&](double t) { return std::polar(1.0, 2 * pi * f * t); });
  const auto d = complex_second_derivative(s);
  CHECK(d.size() == 298);
  CHECK(d.t0 == doctest::Approx(0.01));
  for (const auto& v : d.samples) CHECK(std::abs(v) == doctest::Approx(std::pow(2 * pi * f, 2)).epsilon(1e-2));

  const auto r = csampled(100.0, 50, [](double t) { return cdouble(std::cos(t), 0.0); });
  for (const auto& v : complex_second_derivative(r).samples) CHECK(v.imag() == 0.0);

  const auto ramp = csampled(100.0, 50, [](double t) { return cdouble(3 * t + 1, -2 * t); });
  for (const auto& v : complex_second_derivative(ramp).samples) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("amplitude") {
  ComplexSeries s{std::vector<cdouble>(5, cdouble(3, 4)), 100.0, 0.0};
  for (double v : amplitude(s).samples) CHECK(v == 5.0);
  ComplexSeries z{std::vector<cdouble>(5), 100.0, 0.0};
  for (double v : amplitude(z).samples) CHECK(v == 0.0);
  const auto u = csampled(100.0, 100, [](double t) { return std::polar(1.0, 7 * t * t); });
  for (double v : amplitude(u).samples) CHECK(std::abs(v - 1.0) <= 1e-12);

  const double c = 2.75;
  auto scaled = u;
  for (auto& v : scaled.samples) v *= c;
  const auto a = amplitude(u), b = amplitude(scaled);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.samples[i] == doctest::Approx(c * a.samples[i]).epsilon(1e-15));
}

TEST_CASE("phase unwrapping of a linear phase") {
  const auto s = csampled(100.0, 1000, [](double t) { return std::polar(1.0, 2 * pi * 0.5 * t); });
  const auto p = phase_unwrapped(s);
  double err = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    err = std::max(err, std::abs(p.samples[i] - 2 * pi * 0.5 * static_cast<double>(i) / 100.0));
  }
  CHECK(err <= 1e-9);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p.samples[i] > p.samples[i - 1]);
}

TEST_CASE("phase unwrapping trivial cases") {
  ComplexSeries pos{std::vector<cdouble>(10, cdouble(2.0, 0.0)), 100.0, 0.0};
  for (double v : phase_unwrapped(pos).samples) CHECK(v == 0.0);
  ComplexSeries j{std::vector<cdouble>(10, cdouble(0.0, 1.0)), 100.0, 0.0};
  for (double v : phase_unwrapped(j).samples) CHECK(v == doctest::Approx(pi / 2));
  ComplexSeries zero{{cdouble(1, 0), cdouble(0, 0), cdouble(1, 0)}, 100.0, 0.0};
  CHECK_CODE(phase_unwrapped(zero), ErrorCode::ZeroSample);
}

TEST_CASE("unwrap adjacent differences and idempotence") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.2);
  std::vector<double> truth(500);
  double acc = 0.3;
  for (double& v : truth) {
    acc += g(rng);
    v = acc;
  }
  std::vector<double> wrapped(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) wrapped[i] = std::remainder(truth[i], 2 * pi);
  std::vector<double> once = wrapped;
  unwrap_in_place(once);
  for (std::size_t i = 1; i < once.size(); ++i) {
    const double d = once[i] - once[i - 1];
    CHECK(d > -pi);
    CHECK(d <= pi + 1e-12);
  }
  CHECK(std::abs(once[0]) <= pi);
  std::vector<double> rewrapped(once.size());
  for (std::size_t i = 0; i < once.size(); ++i) rewrapped[i] = std::remainder(once[i], 2 * pi);
  std::vector<double> twice = rewrapped;
  unwrap_in_place(twice);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-12));
}

TEST_CASE("fft forward matches naive DFT") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (std::size_t n : {1u, 2u, 7u, 64u, 200u}) {
    std::vector<cdouble> x(n), y(n);
    for (auto& v : x) v = cdouble(g(rng), g(rng));
    fft::forward(x, y);
    const auto ref = oracle::naive_dft(x);
    double err = 0, mag = 0;
    for (std::size_t k = 0; k < n; ++k) {
      err = std::max(err, std::abs(y[k] - ref[k]));
      mag = std::max(mag, std::abs(ref[k]));
    }
    CHECK(err <= 1e-10 * mag);
  }
}

TEST_CASE("stft of a complex tone") {
  const auto s = csampled(100.0, 1000, [](double t) { return std::polar(1.0, 2 * pi * 3.0 * t); });
  const auto spec = stft_magnitude(s, StftConfig{});
  CHECK(spec.n_frames() == (1000 - 200) / 10 + 1);
  CHECK(spec.n_bins() == 200);
  CHECK(spec.freqs.front() == doctest::Approx(-50.0));
  std::size_t plus3 = 0, minus3 = 0;
  for (std::size_t k = 0; k < spec.n_bins(); ++k) {
    if (std::abs(spec.freqs[k] - 3.0) < 1e-9) plus3 = k;
    if (std::abs(spec.freqs[k] + 3.0) < 1e-9) minus3 = k;
  }
  for (std::size_t f = 0; f < spec.n_frames(); ++f) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < spec.n_bins(); ++k) {
      if (spec.at(f, k) > spec.at(f, arg)) arg = k;
    }
    CHECK(arg == plus3);
    CHECK(spec.at(f, minus3) <= 1e-9 * spec.at(f, plus3));
  }
}

TEST_CASE("stft of a real tone, one-sided") {
  const auto x = sampled(100.0, 600, [](double t) { return std::sin(2 * pi * 7.0 * t); });
  const auto spec = stft_magnitude(x, StftConfig{});
  CHECK(spec.freqs.front() == 0.0);
  CHECK(spec.freqs.back() == doctest::Approx(50.0));
  for (std::size_t f = 0; f < spec.n_frames(); ++f) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < spec.n_bins(); ++k) {
      if (spec.at(f, k) > spec.at(f, arg)) arg = k;
    }
    CHECK(spec.freqs[arg] == doctest::Approx(7.0));
  }
}

TEST_CASE("stft zero input, errors and frame count") {
  ComplexSeries z{std::vector<cdouble>(400), 100.0, 0.0};
  for (double v : stft_magnitude(z, StftConfig{}).values) CHECK(v == 0.0);
  CHECK_CODE(stft_magnitude(ComplexSeries{std::vector<cdouble>(150, 1.0), 100.0, 0.0}, StftConfig{}),
             ErrorCode::WindowTooLong);
  CHECK_CODE(stft_magnitude(z, StftConfig{2.0, 0.0}), ErrorCode::InvalidHop);
  CHECK(stft_frame_count(6000, 100.0, StftConfig{}) == 581);
  CHECK(stft_frame_count(200, 100.0, StftConfig{}) == 1);
}

TEST_CASE("stft per-frame Parseval") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  ComplexSeries s{std::vector<cdouble>(700), 100.0, 0.0};
  for (auto& v : s.samples) v = cdouble(g(rng), g(rng));
  const StftConfig cfg{2.0, 0.37};
  const auto spec = stft_magnitude(s, cfg);
  const std::size_t win = 200, hop = 37;
  for (std::size_t f = 0; f < spec.n_frames(); ++f) {
    double energy = 0, msq = 0;
    for (std::size_t k = 0; k < spec.n_bins(); ++k) energy += spec.at(f, k) * spec.at(f, k);
    for (std::size_t i = 0; i < win; ++i) msq += std::norm(s.samples[f * hop + i]);
    msq /= static_cast<double>(win);
    CHECK(std::abs(energy - cfg.window_len * s.fs * msq) <= 1e-9 * energy);
  }
}
