#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "hbid/signal.hpp"

namespace hbid {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct RadarConfig {
  double fc = 79.0e9;
  double wavelength = kSpeedOfLight / 79.0e9;
  double bandwidth = 3.6e9;
  double chirp_duration = 51.2e-6;
  int n_virtual = 12;
  double element_spacing = 0.5 * kSpeedOfLight / 79.0e9;
  double fs_slow = 100.0;
  int n_fast = 128;

  double range_resolution() const noexcept { return kSpeedOfLight / (2.0 * bandwidth); }
  void validate() const;
};

/// Raw FMCW samples indexed (slow time, virtual element, fast time); fast time varies fastest.
struct DataCube {
  std::vector<std::complex<float>> values;
  std::size_t n_slow = 0;
  RadarConfig config;

  std::size_t n_elements() const noexcept { return static_cast<std::size_t>(config.n_virtual); }
  std::size_t n_fast() const noexcept { return static_cast<std::size_t>(config.n_fast); }
  std::size_t index(std::size_t t, std::size_t m, std::size_t n) const noexcept {
    return (t * n_elements() + m) * n_fast() + n;
  }
  void validate() const;
};

/// Fast-time spectra indexed (slow time, element, range bin).
struct RangeProfiles {
  std::vector<cdouble> values;
  std::size_t n_slow = 0;
  std::size_t n_elements = 0;
  std::size_t n_bins = 0;
  double bin_spacing = 0.0;  ///< m per range bin
  double fs_slow = 0.0;

  cdouble at(std::size_t t, std::size_t m, std::size_t k) const {
    return values[(t * n_elements + m) * n_bins + k];
  }
};

/// Unitary DFT over fast time for every chirp and element.
RangeProfiles range_profile(const DataCube& cube);

struct BeamformResult {
  std::vector<double> angles_deg;
  std::size_t bin_lo = 0;  ///< first range bin covered by the power map
  std::size_t bin_hi = 0;  ///< one past the last
  /// Slow-time mean of |y|^2, row-major (angle, range bin - bin_lo).
  std::vector<double> power;
  /// Steering weights, row-major (angle, element).
  std::vector<cdouble> weights;
  std::size_t n_elements = 0;

  std::size_t n_angles() const noexcept { return angles_deg.size(); }
  std::size_t n_ranges() const noexcept { return bin_hi - bin_lo; }
  double power_at(std::size_t angle, std::size_t bin) const {
    return power[angle * n_ranges() + (bin - bin_lo)];
  }
};

/// Angle grid from lo to hi (inclusive) in `step` degree increments.
std::vector<double> angle_grid(double lo_deg = -60.0, double hi_deg = 60.0, double step_deg = 1.0);

/// Delay-and-sum beamforming with w_m = exp(-j 2 pi (d m / lambda) sin theta) / sqrt(M).
/// The power map covers range bins [bin_lo, bin_hi); bin_hi = 0 means all bins.
BeamformResult beamform(const RangeProfiles& profiles, const RadarConfig& cfg,
                        const std::vector<double>& angles_deg, std::size_t bin_lo = 0,
                        std::size_t bin_hi = 0);
/// Single-threaded reference for the power map.
BeamformResult beamform_serial(const RangeProfiles& profiles, const RadarConfig& cfg,
                               const std::vector<double>& angles_deg, std::size_t bin_lo = 0,
                               std::size_t bin_hi = 0);

/// Slow-time series of the beam steered to `angle_index` at `range_bin`.
ComplexSeries steered_series(const RangeProfiles& profiles, const BeamformResult& bf,
                             std::size_t angle_index, std::size_t range_bin);

struct RangeWindow {
  double lo_m = 0.5;
  double hi_m = 3.0;
};

struct EchoSelection {
  ComplexSeries signal;
  std::size_t angle_index = 0;
  std::size_t range_bin = 0;
  double angle_deg = 0.0;
  double range_m = 0.0;
  double power = 0.0;
  double peak_to_median = 0.0;
  bool low_snr = false;
};

/// Picks the (angle, range) cell of maximum mean power inside the window. The selection is
/// flagged low_snr when the peak is less than `min_peak_to_median` times the median cell power
/// in the window.
EchoSelection select_echo(const RangeProfiles& profiles, const BeamformResult& bf,
                          const RangeWindow& window, double min_peak_to_median = 10.0);

/// range_profile -> beamform (window bins only) -> select_echo.
EchoSelection reconstruct_signal(const DataCube& cube, const RangeWindow& window = {},
                                 const std::vector<double>& angles_deg = angle_grid());

}  // namespace hbid
