#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hbid/signal.hpp"

namespace hbid {

struct MelBankConfig {
  int L = 64;              ///< filter count
  double f_ref = 5.0;      ///< reference frequency of the warping, Hz
  double f_prime = 1000.0; ///< Hz
  double fs = 100.0;       ///< Hz

  void validate() const;
};

/// Mel-spaced triangle edges f_0 .. f_{L+1}. Filter l spans [f_l, f_{l+2}] and peaks at f_{l+1}.
struct MelBank {
  MelBankConfig config;
  std::vector<double> centers;     ///< L + 2 entries, f_0 = 0, f_{L+1} = fs/2
  std::vector<double> mel_points;  ///< L + 2 entries
  double m_tilde = 0.0;

  int size() const noexcept { return config.L; }
};

MelBank build_mel_bank(const MelBankConfig& cfg);

/// Unit-area triangular response of filter `index` at frequency f (Hz).
double filter_response(const MelBank& bank, int index, double f);

struct MelEnergies {
  std::vector<double> positive;  ///< M_{+0} .. M_{+(L-1)}
  std::vector<double> negative;  ///< M_{-0} .. M_{-(L-1)}; empty for one-sided input
  double T0 = 0.0;               ///< time span integrated over, s
};

/// Time/frequency integral of S * H_l over each half of the axis. The spectrogram is treated
/// as piecewise linear in frequency and time (trapezoidal rule); the product with the
/// triangular filters is integrated exactly, so filters narrower than a bin still see energy.
MelEnergies mel_energies(const Spectrogram& spec, const MelBank& bank);

std::vector<double> dct2(std::span<const double> m);

enum class FeatureKind { amp, ph, comp, prop };

std::string_view to_string(FeatureKind kind) noexcept;
FeatureKind feature_kind_from_string(std::string_view name);

struct FeatureVector {
  std::vector<double> values;
  FeatureKind kind = FeatureKind::comp;
  int k_prime = 24;
};

/// Dimension of a feature vector of the given kind and truncation order.
std::size_t feature_dimension(FeatureKind kind, int k_prime) noexcept;

struct ExtractionConfig {
  MelBankConfig mel;  ///< mel.fs is taken from the input signal
  StftConfig stft;
  int K = 64;         ///< cepstral coefficients computed per side
  int k_prime = 24;   ///< coefficients retained per side
  bool log_energies = true;  ///< DCT of log(M + log_floor); false applies it to M directly
  double log_floor = 1e-12;

  void validate() const;
};

FeatureVector extract_features(const ComplexSeries& s, const ExtractionConfig& cfg, FeatureKind kind);

/// Concatenation amp | ph | comp.
FeatureVector fuse(const FeatureVector& amp, const FeatureVector& ph, const FeatureVector& comp);

/// Cepstra of one set of mel energies: DCT-II of each side, truncated to k_prime and
/// ordered [C_-(K'-1) .. C_-0, C_+0 .. C_+(K'-1)] when both sides are present.
std::vector<double> cepstra(const MelEnergies& energies, const ExtractionConfig& cfg);

}  // namespace hbid
