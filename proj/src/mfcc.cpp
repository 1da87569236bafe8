#include "hbid/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hbid/error.hpp"
#include "hbid/fft.hpp"

namespace hbid {
namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

/// w_k = integral of hat_k(f) * H(f) over [g.front(), g.back()], where hat_k is the
/// linear-interpolation basis on grid g and H is a triangle (a, b, c) with peak 2/(c - a).
/// Each grid interval is split at the triangle's breakpoints; on every piece the integrand is
/// quadratic, so Simpson's rule is exact.
std::vector<double> hat_weights(std::span<const double> g, double a, double b, double c) {
  std::vector<double> w(g.size(), 0.0);
  const double peak = 2.0 / (c - a);
  auto tri = [&](double f) {
    if (f <= a || f >= c) return 0.0;
    if (f < b) return peak * (f - a) / (b - a);
    return peak * (c - f) / (c - b);
  };
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double lo = g[k];
    const double hi = g[k + 1];
    if (hi <= a || lo >= c) continue;
    const double span = hi - lo;
    double cuts[5] = {lo, 0, 0, 0, hi};
    int n = 1;
    for (double bp : {a, b, c}) {
      if (bp > lo && bp < hi) cuts[n++] = bp;
    }
    cuts[n] = hi;
    for (int p = 0; p < n; ++p) {
      const double l = cuts[p];
      const double r = cuts[p + 1];
      const double m = 0.5 * (l + r);
      const double len = r - l;
      // Right basis (f - lo)/span and left basis (hi - f)/span.
      const double hl = tri(l), hm = tri(m), hr = tri(r);
      const double right = len / 6.0 *
                           ((l - lo) * hl + 4.0 * (m - lo) * hm + (r - lo) * hr) / span;
      const double left = len / 6.0 *
                          ((hi - l) * hl + 4.0 * (hi - m) * hm + (hi - r) * hr) / span;
      w[k] += left;
      w[k + 1] += right;
    }
  }
  return w;
}

/// Trapezoidal time integral of every bin. A single frame is weighted by its window length.
std::vector<double> time_integral(const Spectrogram& spec, double* span_out) {
  const std::size_t nf = spec.n_frames();
  const std::size_t nb = spec.n_bins();
  std::vector<double> acc(nb, 0.0);
  if (nf == 1) {
    for (std::size_t k = 0; k < nb; ++k) acc[k] = spec.at(0, k) * spec.window_len;
    *span_out = spec.window_len;
    return acc;
  }
  for (std::size_t f = 0; f + 1 < nf; ++f) {
    const double half_dt = 0.5 * (spec.frame_times[f + 1] - spec.frame_times[f]);
    for (std::size_t k = 0; k < nb; ++k) acc[k] += half_dt * (spec.at(f, k) + spec.at(f + 1, k));
  }
  *span_out = spec.frame_times.back() - spec.frame_times.front();
  return acc;
}

/// Integrates one half of the axis. `grid` holds |f| ascending, `vals` the matching
/// time-integrated magnitudes.
std::vector<double> integrate_side(const MelBank& bank, std::span<const double> grid,
                                   std::span<const double> vals) {
  std::vector<double> out(static_cast<std::size_t>(bank.size()), 0.0);
  if (grid.size() < 2) return out;
  for (int l = 0; l < bank.size(); ++l) {
    const auto w = hat_weights(grid, bank.centers[l], bank.centers[l + 1], bank.centers[l + 2]);
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) sum += w[k] * vals[k];
    out[static_cast<std::size_t>(l)] = sum;
  }
  return out;
}

}  // namespace

void MelBankConfig::validate() const {
  if (L < 1) throw Error(ErrorCode::InvalidArgument, "mel bank needs L >= 1");
  if (!(f_ref > 0.0)) throw Error(ErrorCode::InvalidArgument, "f_ref must be positive");
  if (!(f_prime > 0.0)) throw Error(ErrorCode::InvalidArgument, "f_prime must be positive");
  if (!(fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "fs must be positive");
}

MelBank build_mel_bank(const MelBankConfig& cfg) {
  cfg.validate();
  MelBank bank;
  bank.config = cfg;
  bank.m_tilde = cfg.f_prime / std::log(cfg.f_prime / cfg.f_ref + 1.0);
  const double top = std::log1p(cfg.fs / (2.0 * cfg.f_ref));
  const int n = cfg.L + 2;
  bank.mel_points.resize(static_cast<std::size_t>(n));
  bank.centers.resize(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    const double frac = static_cast<double>(l) / static_cast<double>(cfg.L + 1);
    const double m = bank.m_tilde * frac * top;
    bank.mel_points[static_cast<std::size_t>(l)] = m;
    bank.centers[static_cast<std::size_t>(l)] = cfg.f_ref * std::expm1(m / bank.m_tilde);
  }
  return bank;
}

double filter_response(const MelBank& bank, int index, double f) {
  if (index < 0 || index >= bank.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "filter index " + std::to_string(index));
  }
  const double lo = bank.centers[static_cast<std::size_t>(index)];
  const double mid = bank.centers[static_cast<std::size_t>(index) + 1];
  const double hi = bank.centers[static_cast<std::size_t>(index) + 2];
  if (f >= lo && f < mid) return 2.0 * (f - lo) / ((mid - lo) * (hi - lo));
  if (f >= mid && f < hi) return 2.0 * (hi - f) / ((hi - mid) * (hi - lo));
  return 0.0;
}

MelEnergies mel_energies(const Spectrogram& spec, const MelBank& bank) {
  const double fs = bank.config.fs;
  if (!close_rel(spec.fs, fs, 1e-9)) {
    throw Error(ErrorCode::AxisMismatch, "spectrogram fs " + std::to_string(spec.fs) +
                                             " vs mel bank fs " + std::to_string(fs));
  }
  const double nyq = 0.5 * fs;
  if (spec.freqs.empty() || spec.freqs.back() > nyq * (1 + 1e-9) ||
      spec.freqs.front() < -nyq * (1 + 1e-9)) {
    throw Error(ErrorCode::AxisMismatch, "frequency axis exceeds +/- fs/2");
  }
  if (!spec.two_sided && spec.freqs.front() < 0.0) {
    throw Error(ErrorCode::AxisMismatch, "one-sided spectrogram with negative frequencies");
  }
  if (spec.n_frames() == 0) throw Error(ErrorCode::AxisMismatch, "spectrogram has no frames");

  MelEnergies out;
  const auto integ = time_integral(spec, &out.T0);

  std::vector<double> grid, vals;
  const std::size_t nb = spec.n_bins();
  for (std::size_t k = 0; k < nb; ++k) {
    if (spec.freqs[k] >= 0.0) {
      grid.push_back(spec.freqs[k]);
      vals.push_back(integ[k]);
    }
  }
  // An even-length DFT holds the Nyquist bin once, at -fs/2; it is the same bin as +fs/2.
  const bool has_neg_nyquist = close_rel(spec.freqs.front(), -nyq, 1e-9);
  if (spec.two_sided && has_neg_nyquist && !grid.empty() && grid.back() < nyq) {
    grid.push_back(nyq);
    vals.push_back(integ[0]);
  }
  out.positive = integrate_side(bank, grid, vals);

  if (spec.two_sided) {
    grid.clear();
    vals.clear();
    for (std::size_t k = nb; k-- > 0;) {
      if (spec.freqs[k] <= 0.0) {
        grid.push_back(-spec.freqs[k]);
        vals.push_back(integ[k]);
      }
    }
    out.negative = integrate_side(bank, grid, vals);
  }
  return out;
}

std::vector<double> dct2(std::span<const double> m) {
  if (m.empty()) throw Error(ErrorCode::EmptyInput, "dct2 of empty vector");
  std::vector<double> out(m.size());
  fft::dct2(m, out);
  return out;
}

std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::amp: return "amp";
    case FeatureKind::ph: return "ph";
    case FeatureKind::comp: return "comp";
    case FeatureKind::prop: return "prop";
  }
  return "?";
}

FeatureKind feature_kind_from_string(std::string_view name) {
  if (name == "amp") return FeatureKind::amp;
  if (name == "ph") return FeatureKind::ph;
  if (name == "comp") return FeatureKind::comp;
  if (name == "prop") return FeatureKind::prop;
  throw Error(ErrorCode::InvalidArgument, "unknown feature kind '" + std::string(name) + "'");
}

std::size_t feature_dimension(FeatureKind kind, int k_prime) noexcept {
  const auto k = static_cast<std::size_t>(k_prime);
  switch (kind) {
    case FeatureKind::amp:
    case FeatureKind::ph: return k;
    case FeatureKind::comp: return 2 * k;
    case FeatureKind::prop: return 4 * k;
  }
  return 0;
}

void ExtractionConfig::validate() const {
  if (K < 1 || K > mel.L) {
    throw Error(ErrorCode::InvalidArgument, "K must lie in [1, L]");
  }
  if (k_prime < 1 || k_prime >= K) {
    throw Error(ErrorCode::KPrimeTooLarge,
                "K' = " + std::to_string(k_prime) + " must satisfy 0 < K' < K = " + std::to_string(K));
  }
}

std::vector<double> cepstra(const MelEnergies& energies, const ExtractionConfig& cfg) {
  const auto kp = static_cast<std::size_t>(cfg.k_prime);
  auto side = [&](const std::vector<double>& m) {
    std::vector<double> in = m;
    if (cfg.log_energies) {
      for (double& v : in) v = std::log(v + cfg.log_floor);
    }
    auto c = dct2(in);
    c.resize(static_cast<std::size_t>(cfg.K));
    c.resize(kp);
    return c;
  };
  const auto pos = side(energies.positive);
  if (energies.negative.empty()) return pos;
  const auto neg = side(energies.negative);
  std::vector<double> out;
  out.reserve(2 * kp);
  out.insert(out.end(), neg.rbegin(), neg.rend());
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

FeatureVector extract_features(const ComplexSeries& s, const ExtractionConfig& cfg, FeatureKind kind) {
  cfg.validate();
  if (kind == FeatureKind::prop) {
    return fuse(extract_features(s, cfg, FeatureKind::amp), extract_features(s, cfg, FeatureKind::ph),
                extract_features(s, cfg, FeatureKind::comp));
  }
  if (!(s.fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling rate must be positive");
  const auto win = static_cast<std::size_t>(std::llround(cfg.stft.window_len * s.fs));
  if (s.size() < 3 || s.size() - 2 < win) {
    throw Error(ErrorCode::SeriesTooShort, "signal of " + std::to_string(s.size()) +
                                               " samples is shorter than derivative + window (" +
                                               std::to_string(win + 2) + ")");
  }

  MelBankConfig mcfg = cfg.mel;
  mcfg.fs = s.fs;
  const MelBank bank = build_mel_bank(mcfg);

  Spectrogram spec;
  switch (kind) {
    case FeatureKind::comp:
      spec = stft_magnitude(complex_second_derivative(s), cfg.stft, true);
      break;
    case FeatureKind::amp:
      spec = stft_magnitude(second_derivative(amplitude(s)), cfg.stft);
      break;
    case FeatureKind::ph:
      spec = stft_magnitude(second_derivative(phase_unwrapped(s)), cfg.stft);
      break;
    case FeatureKind::prop:
      break;
  }
  FeatureVector fv;
  fv.kind = kind;
  fv.k_prime = cfg.k_prime;
  fv.values = cepstra(mel_energies(spec, bank), cfg);
  return fv;
}

FeatureVector fuse(const FeatureVector& amp, const FeatureVector& ph, const FeatureVector& comp) {
  if (amp.kind != FeatureKind::amp || ph.kind != FeatureKind::ph || comp.kind != FeatureKind::comp) {
    throw Error(ErrorCode::KindMismatch, "fuse expects (amp, ph, comp)");
  }
  if (amp.k_prime != ph.k_prime || amp.k_prime != comp.k_prime) {
    throw Error(ErrorCode::DimensionMismatch, "fuse inputs disagree on K'");
  }
  const int kp = amp.k_prime;
  if (amp.values.size() != feature_dimension(FeatureKind::amp, kp) ||
      ph.values.size() != feature_dimension(FeatureKind::ph, kp) ||
      comp.values.size() != feature_dimension(FeatureKind::comp, kp)) {
    throw Error(ErrorCode::DimensionMismatch, "fuse input dimensions do not match K'");
  }
  FeatureVector out;
  out.kind = FeatureKind::prop;
  out.k_prime = kp;
  out.values.reserve(feature_dimension(FeatureKind::prop, kp));
  out.values.insert(out.values.end(), amp.values.begin(), amp.values.end());
  out.values.insert(out.values.end(), ph.values.begin(), ph.values.end());
  out.values.insert(out.values.end(), comp.values.begin(), comp.values.end());
  return out;
}

}  // namespace hbid
