#include "hbid/radar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hbid/error.hpp"
#include "hbid/fft.hpp"

namespace hbid {
namespace {

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

std::vector<cdouble> steering_weights(const RadarConfig& cfg, const std::vector<double>& angles_deg) {
  const auto m_count = static_cast<std::size_t>(cfg.n_virtual);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m_count));
  std::vector<cdouble> w(angles_deg.size() * m_count);
  for (std::size_t a = 0; a < angles_deg.size(); ++a) {
    const double s = std::sin(angles_deg[a] * std::numbers::pi / 180.0);
    for (std::size_t m = 0; m < m_count; ++m) {
      const double phase =
          -2.0 * std::numbers::pi * (cfg.element_spacing * static_cast<double>(m) / cfg.wavelength) * s;
      w[a * m_count + m] = std::polar(norm, phase);
    }
  }
  return w;
}

BeamformResult prepare(const RangeProfiles& profiles, const RadarConfig& cfg,
                       const std::vector<double>& angles_deg, std::size_t bin_lo, std::size_t bin_hi) {
  if (angles_deg.empty()) throw Error(ErrorCode::EmptyGrid, "beamform needs at least one angle");
  for (double a : angles_deg) {
    if (!(a >= -90.0 && a <= 90.0)) {
      throw Error(ErrorCode::InvalidArgument, "angle " + std::to_string(a) + " outside +/-90 deg");
    }
  }
  if (profiles.n_elements != static_cast<std::size_t>(cfg.n_virtual)) {
    throw Error(ErrorCode::DimensionMismatch, "profile element count differs from config");
  }
  if (bin_hi == 0) bin_hi = profiles.n_bins;
  if (bin_lo >= bin_hi || bin_hi > profiles.n_bins) {
    throw Error(ErrorCode::EmptyWindow, "empty or out-of-range bin span");
  }
  BeamformResult bf;
  bf.angles_deg = angles_deg;
  bf.bin_lo = bin_lo;
  bf.bin_hi = bin_hi;
  bf.n_elements = profiles.n_elements;
  bf.weights = steering_weights(cfg, angles_deg);
  bf.power.assign(angles_deg.size() * (bin_hi - bin_lo), 0.0);
  return bf;
}

// Power row of one steering angle; shared by the serial and the parallel drivers so both
// produce bit-identical maps.
void power_row(const RangeProfiles& p, const BeamformResult& bf, std::size_t a, double* out) {
  const std::size_t nr = bf.n_ranges();
  const cdouble* w = &bf.weights[a * bf.n_elements];
  std::vector<cdouble> y(nr);
  std::fill(out, out + nr, 0.0);
  for (std::size_t t = 0; t < p.n_slow; ++t) {
    std::fill(y.begin(), y.end(), cdouble{});
    for (std::size_t m = 0; m < p.n_elements; ++m) {
      const cdouble* x = &p.values[(t * p.n_elements + m) * p.n_bins + bf.bin_lo];
      for (std::size_t k = 0; k < nr; ++k) y[k] += w[m] * x[k];
    }
    for (std::size_t k = 0; k < nr; ++k) out[k] += std::norm(y[k]);
  }
  const double inv = 1.0 / static_cast<double>(p.n_slow);
  for (std::size_t k = 0; k < nr; ++k) out[k] *= inv;
}

}  // namespace

void RadarConfig::validate() const {
  if (!(fc > 0 && wavelength > 0 && bandwidth > 0 && chirp_duration > 0 && element_spacing > 0 &&
        fs_slow > 0) ||
      n_virtual < 1 || n_fast < 1) {
    throw Error(ErrorCode::InvalidArgument, "radar config values must be positive");
  }
  if (!within(wavelength, kSpeedOfLight / fc, 1e-3)) {
    throw Error(ErrorCode::InvalidArgument, "wavelength inconsistent with centre frequency");
  }
  if (!within(element_spacing, 0.5 * wavelength, 1e-3)) {
    throw Error(ErrorCode::InvalidArgument, "element spacing must be lambda/2");
  }
}

void DataCube::validate() const {
  config.validate();
  if (values.size() != n_slow * n_elements() * n_fast()) {
    throw Error(ErrorCode::DegenerateCube, "cube size does not match its dimensions");
  }
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorCode::DegenerateCube, "cube holds non-finite samples");
    }
  }
}

RangeProfiles range_profile(const DataCube& cube) {
  if (cube.config.n_fast < 2 || cube.n_slow == 0) {
    throw Error(ErrorCode::DegenerateCube, "need n_fast >= 2 and at least one chirp");
  }
  cube.validate();
  RangeProfiles out;
  out.n_slow = cube.n_slow;
  out.n_elements = cube.n_elements();
  out.n_bins = cube.n_fast();
  out.bin_spacing = cube.config.range_resolution();
  out.fs_slow = cube.config.fs_slow;
  out.values.resize(cube.values.size());

  const std::size_t nf = cube.n_fast();
  const std::size_t chirps = cube.n_slow * cube.n_elements();
  const double scale = 1.0 / std::sqrt(static_cast<double>(nf));
#pragma omp parallel
  {
    std::vector<cdouble> in(nf), spec(nf);
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chirps); ++c) {
      const std::size_t base = static_cast<std::size_t>(c) * nf;
      for (std::size_t n = 0; n < nf; ++n) in[n] = cdouble(cube.values[base + n]);
      fft::forward(in, spec);
      for (std::size_t k = 0; k < nf; ++k) out.values[base + k] = spec[k] * scale;
    }
  }
  return out;
}

std::vector<double> angle_grid(double lo_deg, double hi_deg, double step_deg) {
  if (!(step_deg > 0.0) || hi_deg < lo_deg) throw Error(ErrorCode::EmptyGrid, "invalid angle grid");
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) grid.push_back(lo_deg + static_cast<double>(i) * step_deg);
  return grid;
}

BeamformResult beamform(const RangeProfiles& profiles, const RadarConfig& cfg,
                        const std::vector<double>& angles_deg, std::size_t bin_lo, std::size_t bin_hi) {
  BeamformResult bf = prepare(profiles, cfg, angles_deg, bin_lo, bin_hi);
  const auto n_angles = static_cast<std::ptrdiff_t>(bf.n_angles());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t a = 0; a < n_angles; ++a) {
    power_row(profiles, bf, static_cast<std::size_t>(a), &bf.power[static_cast<std::size_t>(a) * bf.n_ranges()]);
  }
  return bf;
}

BeamformResult beamform_serial(const RangeProfiles& profiles, const RadarConfig& cfg,
                               const std::vector<double>& angles_deg, std::size_t bin_lo,
                               std::size_t bin_hi) {
  BeamformResult bf = prepare(profiles, cfg, angles_deg, bin_lo, bin_hi);
  for (std::size_t a = 0; a < bf.n_angles(); ++a) {
    power_row(profiles, bf, a, &bf.power[a * bf.n_ranges()]);
  }
  return bf;
}

ComplexSeries steered_series(const RangeProfiles& profiles, const BeamformResult& bf,
                             std::size_t angle_index, std::size_t range_bin) {
  if (angle_index >= bf.n_angles() || range_bin >= profiles.n_bins) {
    throw Error(ErrorCode::IndexOutOfRange, "steered_series cell out of range");
  }
  ComplexSeries s;
  s.fs = profiles.fs_slow;
  s.samples.resize(profiles.n_slow);
  const cdouble* w = &bf.weights[angle_index * bf.n_elements];
  for (std::size_t t = 0; t < profiles.n_slow; ++t) {
    cdouble y{};
    for (std::size_t m = 0; m < profiles.n_elements; ++m) y += w[m] * profiles.at(t, m, range_bin);
    s.samples[t] = y;
  }
  return s;
}

EchoSelection select_echo(const RangeProfiles& profiles, const BeamformResult& bf,
                          const RangeWindow& window, double min_peak_to_median) {
  const double dr = profiles.bin_spacing;
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(window.lo_m / dr - 1e-9)));
  const auto hi_incl = static_cast<std::ptrdiff_t>(std::floor(window.hi_m / dr + 1e-9));
  const std::size_t first = std::max(lo, bf.bin_lo);
  const std::size_t last =
      std::min<std::size_t>(hi_incl < 0 ? 0 : static_cast<std::size_t>(hi_incl) + 1, bf.bin_hi);
  if (!(window.hi_m >= window.lo_m) || first >= last) {
    throw Error(ErrorCode::EmptyWindow, "range window selects no beamformed bins");
  }

  EchoSelection sel;
  std::vector<double> cells;
  double best = -1.0;
  for (std::size_t a = 0; a < bf.n_angles(); ++a) {
    for (std::size_t k = first; k < last; ++k) {
      const double p = bf.power_at(a, k);
      cells.push_back(p);
      if (p > best) {
        best = p;
        sel.angle_index = a;
        sel.range_bin = k;
      }
    }
  }
  auto mid = cells.begin() + static_cast<std::ptrdiff_t>(cells.size() / 2);
  std::nth_element(cells.begin(), mid, cells.end());
  const double median = *mid;
  sel.power = best;
  sel.peak_to_median = median > 0.0 ? best / median : (best > 0.0 ? INFINITY : 1.0);
  sel.low_snr = !(sel.peak_to_median >= min_peak_to_median);
  sel.angle_deg = bf.angles_deg[sel.angle_index];
  sel.range_m = static_cast<double>(sel.range_bin) * dr;
  sel.signal = steered_series(profiles, bf, sel.angle_index, sel.range_bin);
  return sel;
}

EchoSelection reconstruct_signal(const DataCube& cube, const RangeWindow& window,
                                 const std::vector<double>& angles_deg) {
  const RangeProfiles profiles = range_profile(cube);
  const double dr = profiles.bin_spacing;
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil(window.lo_m / dr - 1e-9)));
  const auto hi = std::min(profiles.n_bins, static_cast<std::size_t>(std::max(0.0, std::floor(window.hi_m / dr + 1e-9))) + 1);
  if (lo >= hi) throw Error(ErrorCode::EmptyWindow, "range window outside the profile extent");
  const BeamformResult bf = beamform(profiles, cube.config, angles_deg, lo, hi);
  return select_echo(profiles, bf, window);
}

}  // namespace hbid
