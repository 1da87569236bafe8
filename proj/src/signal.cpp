#include "hbid/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hbid/error.hpp"
#include "hbid/fft.hpp"

namespace hbid {
namespace {

void check_rate(double fs) {
  if (!(fs > 0.0) || !std::isfinite(fs)) {
    throw Error(ErrorCode::InvalidArgument, "sampling rate must be positive, got " + std::to_string(fs));
  }
}

void check_length(std::size_t n, std::size_t min_len) {
  if (n < min_len) {
    throw Error(ErrorCode::SeriesTooShort,
                "need at least " + std::to_string(min_len) + " samples, got " + std::to_string(n));
  }
}

Spectrogram stft_impl(std::span<const cdouble> x, double fs, double t0, const StftConfig& cfg,
                      bool two_sided) {
  check_rate(fs);
  const std::size_t n_frames = stft_frame_count(x.size(), fs, cfg);
  const auto win = static_cast<std::size_t>(std::llround(cfg.window_len * fs));
  const auto hop = static_cast<std::size_t>(std::llround(cfg.hop * fs));

  Spectrogram spec;
  spec.window_len = cfg.window_len;
  spec.hop = cfg.hop;
  spec.two_sided = two_sided;
  spec.fs = fs;

  const double df = fs / static_cast<double>(win);
  const std::size_t shift = win / 2;
  // Two-sided bins are fftshifted so the axis runs from the most negative frequency upward.
  if (two_sided) {
    spec.freqs.resize(win);
    for (std::size_t j = 0; j < win; ++j) {
      spec.freqs[j] = (static_cast<double>(j) - static_cast<double>(shift)) * df;
    }
  } else {
    spec.freqs.resize(win / 2 + 1);
    for (std::size_t k = 0; k < spec.freqs.size(); ++k) spec.freqs[k] = static_cast<double>(k) * df;
  }
  const std::size_t n_bins = spec.freqs.size();

  spec.frame_times.resize(n_frames);
  spec.values.assign(n_frames * n_bins, 0.0);

  const double scale = 1.0 / std::sqrt(static_cast<double>(win));
  std::vector<cdouble> buf(win);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * hop;
    spec.frame_times[f] = t0 + (static_cast<double>(start) + 0.5 * static_cast<double>(win)) / fs;
    fft::forward(x.subspan(start, win), buf);
    double* row = &spec.values[f * n_bins];
    if (two_sided) {
      for (std::size_t j = 0; j < win; ++j) {
        const std::size_t k = (j + win - shift) % win;
        row[j] = std::abs(buf[k]) * scale;
      }
    } else {
      for (std::size_t k = 0; k < n_bins; ++k) row[k] = std::abs(buf[k]) * scale;
    }
  }
  return spec;
}

}  // namespace

RealSeries second_derivative(const RealSeries& x) {
  check_rate(x.fs);
  check_length(x.size(), 3);
  const double fs2 = x.fs * x.fs;
  RealSeries y;
  y.fs = x.fs;
  y.samples.resize(x.size() - 2);
  const auto& s = x.samples;
  for (std::size_t n = 1; n + 1 < s.size(); ++n) {
    y.samples[n - 1] = (s[n + 1] - 2.0 * s[n] + s[n - 1]) * fs2;
  }
  return y;
}

ComplexSeries complex_second_derivative(const ComplexSeries& s) {
  check_rate(s.fs);
  check_length(s.size(), 3);
  const double fs2 = s.fs * s.fs;
  ComplexSeries y;
  y.fs = s.fs;
  y.t0 = s.t0 + 1.0 / s.fs;
  y.samples.resize(s.size() - 2);
  const auto& v = s.samples;
  for (std::size_t n = 1; n + 1 < v.size(); ++n) {
    const double re = (v[n + 1].real() - 2.0 * v[n].real() + v[n - 1].real()) * fs2;
    const double im = (v[n + 1].imag() - 2.0 * v[n].imag() + v[n - 1].imag()) * fs2;
    y.samples[n - 1] = {re, im};
  }
  return y;
}

RealSeries amplitude(const ComplexSeries& s) {
  check_rate(s.fs);
  check_length(s.size(), 1);
  RealSeries out;
  out.fs = s.fs;
  out.samples.reserve(s.size());
  for (const auto& z : s.samples) out.samples.push_back(std::abs(z));
  return out;
}

void unwrap_in_place(std::span<double> phase) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // Track the integer number of turns so long records do not accumulate rounding.
  double prev = phase.empty() ? 0.0 : phase[0];
  double turns = 0.0;
  for (std::size_t n = 1; n < phase.size(); ++n) {
    const double raw = phase[n];
    const double d = raw - prev;
    turns -= std::ceil((d - std::numbers::pi) / kTwoPi);
    prev = raw;
    phase[n] = raw + kTwoPi * turns;
  }
}

RealSeries phase_unwrapped(const ComplexSeries& s) {
  check_rate(s.fs);
  check_length(s.size(), 1);
  RealSeries out;
  out.fs = s.fs;
  out.samples.resize(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    const auto z = s.samples[n];
    if (z.real() == 0.0 && z.imag() == 0.0) {
      throw Error(ErrorCode::ZeroSample, "phase undefined at sample " + std::to_string(n));
    }
    double p = std::atan2(z.imag(), z.real());
    if (p <= -std::numbers::pi) p = std::numbers::pi;
    out.samples[n] = p;
  }
  unwrap_in_place(out.samples);
  return out;
}

std::size_t stft_frame_count(std::size_t n_samples, double fs, const StftConfig& cfg) {
  if (!(cfg.hop > 0.0)) throw Error(ErrorCode::InvalidHop, "hop must be positive");
  const auto hop = std::llround(cfg.hop * fs);
  if (hop < 1) throw Error(ErrorCode::InvalidHop, "hop shorter than one sample");
  const auto win = std::llround(cfg.window_len * fs);
  if (win < 1) throw Error(ErrorCode::WindowTooLong, "window shorter than one sample");
  if (static_cast<std::size_t>(win) > n_samples) {
    throw Error(ErrorCode::WindowTooLong, "window of " + std::to_string(win) +
                                              " samples exceeds signal of " +
                                              std::to_string(n_samples));
  }
  return (n_samples - static_cast<std::size_t>(win)) / static_cast<std::size_t>(hop) + 1;
}

Spectrogram stft_magnitude(const ComplexSeries& x, const StftConfig& cfg, bool two_sided) {
  return stft_impl(x.samples, x.fs, x.t0, cfg, two_sided);
}

Spectrogram stft_magnitude(const RealSeries& x, const StftConfig& cfg) {
  std::vector<cdouble> z(x.samples.begin(), x.samples.end());
  return stft_impl(z, x.fs, 0.0, cfg, false);
}

}  // namespace hbid
