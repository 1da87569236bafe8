#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hbid/radar.hpp"
#include "hbid/signal.hpp"

namespace hbid {

/// One Gaussian lobe of the per-beat displacement waveform. `amplitude` is relative to the
/// profile's heart_amp_m; centre and width are fractions of the beat period.
struct PulseLobe {
  double amplitude = 1.0;
  double center = 0.3;
  double width = 0.08;
};

struct PersonProfile {
  int id = 0;
  double heart_rate_hz = 1.2;
  double hrv_std = 0.02;  ///< beat-period jitter, s
  std::vector<PulseLobe> pulse_template{{1.0, 0.25, 0.07}, {0.35, 0.55, 0.10}};
  double resp_rate_hz = 0.25;
  double resp_amp_m = 4e-3;
  double heart_amp_m = 1.5e-4;
  /// Beat-synchronous echo amplitude modulation: A(t) = 1 + am_depth * a(t), where a(t) is built
  /// from am_template on the same beat onsets (pulse_template when empty).
  double am_depth = 0.0;
  std::vector<PulseLobe> am_template;
  /// Low-frequency (1/f) body-motion drift amplitude, m.
  double drift_amp_m = 0.0;

  void validate() const;
};

struct DisplacementParts {
  RealSeries respiration;
  RealSeries heartbeat;
  RealSeries drift;
  RealSeries modulation;  ///< a(t), unitless; not part of the displacement

  RealSeries total() const;
};

/// Chest displacement components; a pure function of (profile, duration, fs, seed).
DisplacementParts displacement_parts(const PersonProfile& profile, double duration, double fs,
                                     std::uint64_t seed);
RealSeries displacement(const PersonProfile& profile, double duration, double fs, std::uint64_t seed);

/// s(t) = A(t) exp(j 4 pi d(t) / lambda) + circular Gaussian noise at `snr_db` against a unit
/// carrier. A(t) = 1 unless an envelope is supplied.
ComplexSeries render_baseband(const RealSeries& d, const RadarConfig& cfg, double snr_db,
                              std::uint64_t seed, std::span<const double> envelope = {});

/// A point scatterer for cube rendering; the range is r0_m + d(t).
struct ScatterTarget {
  RealSeries displacement;
  double r0_m = 1.5;
  double angle_deg = 0.0;
  std::vector<double> envelope;  ///< per slow-time sample; empty means unit amplitude
  double phase0 = 0.0;
};

/// Stop-and-go FMCW beat model: fast-time tone at R / dR bins, carrier phase 4 pi R / lambda,
/// element phase 2 pi (d m / lambda) sin(theta). Noise per sample at `snr_db` against unit amplitude.
DataCube render_cube(std::span<const ScatterTarget> targets, const RadarConfig& cfg,
                     std::size_t n_slow, double snr_db, std::uint64_t seed);

struct SessionId {
  int day = 1;
  bool afternoon = false;

  std::string str() const;  ///< "d1-am"
  static SessionId parse(const std::string& text);
  bool operator==(const SessionId&) const = default;
};

struct Schedule {
  int days = 5;
  int reps_per_half_day = 5;

  std::vector<SessionId> sessions() const;
};

struct NuisanceConfig {
  double amp_scale_spread = 0.05;  ///< session amplitude scale drawn from 1 +/- spread
  double heart_rate_drift = 0.03;  ///< fractional, capped at 0.05
  double resp_rate_drift = 0.05;   ///< fractional
  bool random_phase = true;        ///< session carrier phase offset
  /// Static reflector sharing the target's cell, relative to the unit carrier; its phase is
  /// redrawn per session. Interference with it carries the chest motion into |s(t)|.
  double clutter_amp = 0.0;
};

enum class SignalMode { baseband, cube };

struct CohortConfig {
  double duration = 60.0;
  double fs = 100.0;
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  SignalMode mode = SignalMode::baseband;
  RadarConfig radar;
  NuisanceConfig nuisance;
  double range_m = 1.5;
  double angle_deg = 0.0;
};

struct Measurement {
  std::variant<ComplexSeries, DataCube> signal;
  int label = 0;
  SessionId session;
  int repetition = 1;
  std::uint64_t seed = 0;
  int segment_index = 0;

  double duration() const;
};

/// Stable 64-bit mixing of a seed with identifiers (splitmix64 finaliser chain).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

Measurement generate_measurement(const PersonProfile& profile, const SessionId& session,
                                 int repetition, const CohortConfig& cfg);

/// One measurement per (profile, session, repetition), profile-major order.
std::vector<Measurement> generate_cohort(const std::vector<PersonProfile>& profiles,
                                         const Schedule& schedule, const CohortConfig& cfg);

std::vector<Measurement> segment(const Measurement& m, double seg_len);

/// Six profiles with well separated heart rates and pulse shapes.
std::vector<PersonProfile> default_profiles();
/// Six profiles with heart rates inside the session drift of each other and distinct
/// beat-locked reflectivity waveforms.
std::vector<PersonProfile> hard_profiles();

}  // namespace hbid
