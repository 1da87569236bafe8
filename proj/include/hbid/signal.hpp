#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hbid {

using cdouble = std::complex<double>;

/// Uniformly sampled complex baseband signal (slow-time I/Q).
struct ComplexSeries {
  std::vector<cdouble> samples;
  double fs = 0.0;  ///< Hz
  double t0 = 0.0;  ///< s

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept { return static_cast<double>(samples.size()) / fs; }
};

struct RealSeries {
  std::vector<double> samples;
  double fs = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept { return static_cast<double>(samples.size()) / fs; }
};

/// Magnitude STFT, row-major (frame, bin).
struct Spectrogram {
  std::vector<double> values;
  std::vector<double> freqs;        ///< strictly increasing, Hz
  std::vector<double> frame_times;  ///< frame centres, s
  double window_len = 0.0;
  double hop = 0.0;
  bool two_sided = false;
  double fs = 0.0;

  std::size_t n_frames() const noexcept { return frame_times.size(); }
  std::size_t n_bins() const noexcept { return freqs.size(); }
  double& at(std::size_t frame, std::size_t bin) { return values[frame * freqs.size() + bin]; }
  double at(std::size_t frame, std::size_t bin) const { return values[frame * freqs.size() + bin]; }
};

struct StftConfig {
  double window_len = 2.0;  ///< s, rectangular
  double hop = 0.1;         ///< s
};

/// Central second difference scaled by fs^2. Output drops both endpoints.
RealSeries second_derivative(const RealSeries& x);
ComplexSeries complex_second_derivative(const ComplexSeries& s);

RealSeries amplitude(const ComplexSeries& s);

/// Principal phase, unwrapped so that adjacent differences lie in (-pi, pi].
RealSeries phase_unwrapped(const ComplexSeries& s);

/// In-place unwrap of a principal-value phase sequence.
void unwrap_in_place(std::span<double> phase);

/// Rectangular-window STFT magnitude with a unitary DFT (1/sqrt(N)).
/// Complex input may be two-sided (axis centred on 0 Hz); real input is one-sided.
Spectrogram stft_magnitude(const ComplexSeries& x, const StftConfig& cfg, bool two_sided = true);
Spectrogram stft_magnitude(const RealSeries& x, const StftConfig& cfg);

/// Frame count for n samples; throws WindowTooLong / InvalidHop.
std::size_t stft_frame_count(std::size_t n_samples, double fs, const StftConfig& cfg);

}  // namespace hbid
