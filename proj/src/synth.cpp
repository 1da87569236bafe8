#include "hbid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hbid/error.hpp"

namespace hbid {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t sample_count(double duration, double fs) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorCode::InvalidDuration, "duration must be positive, got " + std::to_string(duration));
  }
  if (!(fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "fs must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  if (n == 0) throw Error(ErrorCode::InvalidDuration, "duration shorter than one sample");
  return n;
}

void add_circular_noise(std::vector<cdouble>& x, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) return;
  const double sigma = std::sqrt(0.5 * std::pow(10.0, -snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (auto& v : x) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += cdouble(re, im);
  }
}

}  // namespace

void PersonProfile::validate() const {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  std::string bad;
  if (!in(heart_rate_hz, 0.7, 2.0)) bad = "heart_rate_hz";
  else if (!in(resp_rate_hz, 0.1, 0.5)) bad = "resp_rate_hz";
  else if (!in(heart_amp_m, 1e-5, 5e-4)) bad = "heart_amp_m";
  else if (!in(resp_amp_m, 1e-3, 1e-2)) bad = "resp_amp_m";
  else if (!(hrv_std >= 0.0) || !std::isfinite(hrv_std)) bad = "hrv_std";
  else if (!(am_depth >= 0.0 && am_depth < 1.0)) bad = "am_depth";
  else if (!(drift_amp_m >= 0.0) || !std::isfinite(drift_amp_m)) bad = "drift_amp_m";
  else if (pulse_template.empty()) bad = "pulse_template";
  for (const auto* lobes : {&pulse_template, &am_template}) {
    for (const auto& lobe : *lobes) {
      if (!std::isfinite(lobe.amplitude) || !std::isfinite(lobe.center) || !(lobe.width > 0.0)) {
        bad = lobes == &pulse_template ? "pulse_template" : "am_template";
      }
    }
  }
  if (!bad.empty()) {
    throw Error(ErrorCode::InvalidProfile, "profile " + std::to_string(id) + ": " + bad + " out of range");
  }
}

RealSeries DisplacementParts::total() const {
  RealSeries d = respiration;
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    d.samples[i] += heartbeat.samples[i] + drift.samples[i];
  }
  return d;
}

DisplacementParts displacement_parts(const PersonProfile& profile, double duration, double fs,
                                     std::uint64_t seed) {
  const std::size_t n = sample_count(duration, fs);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  DisplacementParts parts;
  for (RealSeries* s : {&parts.respiration, &parts.heartbeat, &parts.drift, &parts.modulation}) {
    s->fs = fs;
    s->samples.assign(n, 0.0);
  }

  const double resp_phase = kTwoPi * unit(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    parts.respiration.samples[i] =
        profile.resp_amp_m * std::sin(kTwoPi * profile.resp_rate_hz * t + resp_phase);
  }

  if (profile.heart_amp_m != 0.0 && profile.heart_rate_hz > 0.0) {
    const double period = 1.0 / profile.heart_rate_hz;
    double onset = -period * unit(rng);
    auto& h = parts.heartbeat.samples;
    while (onset < duration) {
      double interval = period + profile.hrv_std * gauss(rng);
      interval = std::max(interval, 0.5 * period);
      auto add_lobes = [&](const std::vector<PulseLobe>& lobes, double scale, std::vector<double>& out) {
        for (const auto& lobe : lobes) {
          const double centre = onset + lobe.center * interval;
          const double sigma = lobe.width * interval;
          const double amp = lobe.amplitude * scale;
          const auto lo = static_cast<std::ptrdiff_t>(std::floor((centre - 5.0 * sigma) * fs));
          const auto hi = static_cast<std::ptrdiff_t>(std::ceil((centre + 5.0 * sigma) * fs));
          for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo, 0);
               i <= hi && i < static_cast<std::ptrdiff_t>(n); ++i) {
            const double z = (static_cast<double>(i) / fs - centre) / sigma;
            out[static_cast<std::size_t>(i)] += amp * std::exp(-0.5 * z * z);
          }
        }
      };
      add_lobes(profile.pulse_template, profile.heart_amp_m, h);
      add_lobes(profile.am_template.empty() ? profile.pulse_template : profile.am_template, 1.0,
                parts.modulation.samples);
      onset += interval;
    }
  }

  if (profile.drift_amp_m > 0.0) {
    constexpr int kTerms = 8;
    constexpr double kBase = 0.01;  // Hz
    double norm = 0.0;
    double phases[kTerms];
    for (int k = 0; k < kTerms; ++k) {
      phases[k] = kTwoPi * unit(rng);
      norm += 1.0 / std::sqrt(k + 1.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      double v = 0.0;
      for (int k = 0; k < kTerms; ++k) {
        v += std::sin(kTwoPi * kBase * (k + 1) * t + phases[k]) / std::sqrt(k + 1.0);
      }
      parts.drift.samples[i] = profile.drift_amp_m * v / norm;
    }
  }
  return parts;
}

RealSeries displacement(const PersonProfile& profile, double duration, double fs, std::uint64_t seed) {
  return displacement_parts(profile, duration, fs, seed).total();
}

ComplexSeries render_baseband(const RealSeries& d, const RadarConfig& cfg, double snr_db,
                              std::uint64_t seed, std::span<const double> envelope) {
  if (!envelope.empty() && envelope.size() != d.size()) {
    throw Error(ErrorCode::DimensionMismatch, "envelope length differs from displacement");
  }
  ComplexSeries s;
  s.fs = d.fs;
  s.samples.resize(d.size());
  const double k = 4.0 * std::numbers::pi / cfg.wavelength;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double a = envelope.empty() ? 1.0 : envelope[i];
    s.samples[i] = std::polar(a, k * d.samples[i]);
  }
  add_circular_noise(s.samples, snr_db, seed);
  return s;
}

DataCube render_cube(std::span<const ScatterTarget> targets, const RadarConfig& cfg,
                     std::size_t n_slow, double snr_db, std::uint64_t seed) {
  cfg.validate();
  DataCube cube;
  cube.config = cfg;
  cube.n_slow = n_slow;
  const std::size_t nm = cube.n_elements();
  const std::size_t nf = cube.n_fast();
  std::vector<cdouble> acc(n_slow * nm * nf, cdouble{});

  const double dr = cfg.range_resolution();
  const double k_carrier = 4.0 * std::numbers::pi / cfg.wavelength;
  for (const auto& tg : targets) {
    if (tg.displacement.size() < n_slow) {
      throw Error(ErrorCode::DimensionMismatch, "target displacement shorter than the cube");
    }
    if (!tg.envelope.empty() && tg.envelope.size() < n_slow) {
      throw Error(ErrorCode::DimensionMismatch, "target envelope shorter than the cube");
    }
    const double elem = kTwoPi * (cfg.element_spacing / cfg.wavelength) *
                        std::sin(tg.angle_deg * std::numbers::pi / 180.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(n_slow); ++ti) {
      const auto t = static_cast<std::size_t>(ti);
      const double range = tg.r0_m + tg.displacement.samples[t];
      const double beat = kTwoPi * (range / dr) / static_cast<double>(nf);
      const double amp = tg.envelope.empty() ? 1.0 : tg.envelope[t];
      const double carrier = k_carrier * range + tg.phase0;
      for (std::size_t m = 0; m < nm; ++m) {
        const double base = carrier + elem * static_cast<double>(m);
        cdouble* row = &acc[(t * nm + m) * nf];
        for (std::size_t n = 0; n < nf; ++n) {
          row[n] += std::polar(amp, base + beat * static_cast<double>(n));
        }
      }
    }
  }
  add_circular_noise(acc, snr_db, seed);
  cube.values.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    cube.values[i] = std::complex<float>(static_cast<float>(acc[i].real()), static_cast<float>(acc[i].imag()));
  }
  return cube;
}

std::string SessionId::str() const {
  return "d" + std::to_string(day) + (afternoon ? "-pm" : "-am");
}

SessionId SessionId::parse(const std::string& text) {
  const auto dash = text.find('-');
  if (text.size() < 4 || text[0] != 'd' || dash == std::string::npos) {
    throw Error(ErrorCode::FormatError, "bad session id '" + text + "'");
  }
  SessionId id;
  try {
    id.day = std::stoi(text.substr(1, dash - 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::FormatError, "bad session id '" + text + "'");
  }
  const std::string half = text.substr(dash + 1);
  if (half == "am") id.afternoon = false;
  else if (half == "pm") id.afternoon = true;
  else throw Error(ErrorCode::FormatError, "bad session id '" + text + "'");
  return id;
}

std::vector<SessionId> Schedule::sessions() const {
  std::vector<SessionId> out;
  for (int d = 1; d <= days; ++d) {
    out.push_back({d, false});
    out.push_back({d, true});
  }
  return out;
}

double Measurement::duration() const {
  if (const auto* s = std::get_if<ComplexSeries>(&signal)) return s->duration();
  const auto& cube = std::get<DataCube>(signal);
  return static_cast<double>(cube.n_slow) / cube.config.fs_slow;
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix(seed);
  for (std::uint64_t p : parts) h = splitmix(h ^ splitmix(p + 0x632BE59BD9B4E019ULL));
  return h;
}

Measurement generate_measurement(const PersonProfile& profile, const SessionId& session,
                                 int repetition, const CohortConfig& cfg) {
  profile.validate();
  const auto label = static_cast<std::uint64_t>(profile.id);
  const auto day = static_cast<std::uint64_t>(session.day);
  const std::uint64_t half = session.afternoon ? 1 : 0;
  const std::uint64_t session_seed = derive_seed(cfg.seed, {label, day, half, 0x5E5510ULL});
  const std::uint64_t meas_seed =
      derive_seed(cfg.seed, {label, day, half, static_cast<std::uint64_t>(repetition)});

  std::mt19937_64 rng(session_seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& nz = cfg.nuisance;
  const double amp_scale = 1.0 + nz.amp_scale_spread * sym(rng);
  const double hr_factor = 1.0 + std::min(nz.heart_rate_drift, 0.05) * sym(rng);
  const double rr_factor = 1.0 + nz.resp_rate_drift * sym(rng);
  const double phase0 = nz.random_phase ? kTwoPi * unit(rng) : 0.0;
  const cdouble clutter = std::polar(nz.clutter_amp, kTwoPi * unit(rng));

  PersonProfile p = profile;
  p.heart_rate_hz *= hr_factor;
  p.resp_rate_hz *= rr_factor;

  const auto parts = displacement_parts(p, cfg.duration, cfg.fs, derive_seed(meas_seed, {1}));
  const RealSeries d = parts.total();
  std::vector<double> envelope(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    envelope[i] = amp_scale * (1.0 + p.am_depth * parts.modulation.samples[i]);
  }

  Measurement m;
  m.label = profile.id;
  m.session = session;
  m.repetition = repetition;
  m.seed = meas_seed;
  const std::uint64_t noise_seed = derive_seed(meas_seed, {2});
  if (cfg.mode == SignalMode::baseband) {
    ComplexSeries s = render_baseband(d, cfg.radar, cfg.snr_db, noise_seed, envelope);
    const cdouble rot = std::polar(1.0, phase0);
    for (auto& v : s.samples) v = v * rot + clutter;
    m.signal = std::move(s);
  } else {
    RadarConfig rc = cfg.radar;
    rc.fs_slow = cfg.fs;
    std::vector<ScatterTarget> targets{{d, cfg.range_m, cfg.angle_deg, std::move(envelope), phase0}};
    if (nz.clutter_amp > 0.0) {
      RealSeries still{std::vector<double>(d.size(), 0.0), d.fs};
      targets.push_back({std::move(still), cfg.range_m, cfg.angle_deg,
                         std::vector<double>(d.size(), nz.clutter_amp), std::arg(clutter)});
    }
    m.signal = render_cube(targets, rc, d.size(), cfg.snr_db, noise_seed);
  }
  return m;
}

std::vector<Measurement> generate_cohort(const std::vector<PersonProfile>& profiles,
                                         const Schedule& schedule, const CohortConfig& cfg) {
  if (profiles.size() < 2) throw Error(ErrorCode::InvalidProfile, "cohort needs at least two profiles");
  const auto sessions = schedule.sessions();
  if (sessions.empty() || schedule.reps_per_half_day < 1) {
    throw Error(ErrorCode::ScheduleEmpty, "schedule has no sessions or repetitions");
  }
  for (const auto& p : profiles) p.validate();
  const std::size_t reps = static_cast<std::size_t>(schedule.reps_per_half_day);
  const std::size_t per_profile = sessions.size() * reps;
  std::vector<Measurement> out(profiles.size() * per_profile);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(out.size()); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::size_t pi = idx / per_profile;
    const std::size_t si = (idx % per_profile) / reps;
    const int rep = static_cast<int>(idx % reps) + 1;
    out[idx] = generate_measurement(profiles[pi], sessions[si], rep, cfg);
  }
  return out;
}

std::vector<Measurement> segment(const Measurement& m, double seg_len) {
  const bool is_cube = std::holds_alternative<DataCube>(m.signal);
  const double fs = is_cube ? std::get<DataCube>(m.signal).config.fs_slow
                            : std::get<ComplexSeries>(m.signal).fs;
  const std::size_t n = is_cube ? std::get<DataCube>(m.signal).n_slow
                                : std::get<ComplexSeries>(m.signal).size();
  const double exact = seg_len * fs;
  const auto seg = static_cast<std::size_t>(std::llround(exact));
  if (!(seg_len > 0.0) || seg == 0 || std::abs(exact - static_cast<double>(seg)) > 1e-6 || n % seg != 0) {
    throw Error(ErrorCode::NonDivisibleLength, "segment length " + std::to_string(seg_len) +
                                                   " s does not divide " + std::to_string(n) +
                                                   " samples at " + std::to_string(fs) + " Hz");
  }
  std::vector<Measurement> out;
  for (std::size_t i = 0; i < n / seg; ++i) {
    Measurement part;
    part.label = m.label;
    part.session = m.session;
    part.repetition = m.repetition;
    part.seed = m.seed;
    part.segment_index = static_cast<int>(i);
    if (is_cube) {
      const auto& cube = std::get<DataCube>(m.signal);
      DataCube c;
      c.config = cube.config;
      c.n_slow = seg;
      const std::size_t stride = cube.n_elements() * cube.n_fast();
      c.values.assign(cube.values.begin() + static_cast<std::ptrdiff_t>(i * seg * stride),
                      cube.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * seg * stride));
      part.signal = std::move(c);
    } else {
      const auto& s = std::get<ComplexSeries>(m.signal);
      ComplexSeries c;
      c.fs = s.fs;
      c.t0 = s.t0 + static_cast<double>(i * seg) / s.fs;
      c.samples.assign(s.samples.begin() + static_cast<std::ptrdiff_t>(i * seg),
                       s.samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * seg));
      part.signal = std::move(c);
    }
    out.push_back(std::move(part));
  }
  return out;
}

std::vector<PersonProfile> default_profiles() {
  std::vector<PersonProfile> p(6);
  const double hr[] = {0.95, 1.10, 1.25, 1.40, 1.55, 1.70};
  const double rr[] = {0.18, 0.31, 0.24, 0.36, 0.21, 0.28};
  const double heart_amp[] = {2.0e-4, 1.2e-4, 1.6e-4, 2.5e-4, 1.0e-4, 1.8e-4};
  const double resp_amp[] = {5.0e-3, 3.0e-3, 4.0e-3, 6.0e-3, 3.5e-3, 4.5e-3};
  const double am[] = {0.10, 0.25, 0.15, 0.30, 0.20, 0.12};
  const std::vector<std::vector<PulseLobe>> templates = {
      {{1.0, 0.20, 0.06}, {0.40, 0.50, 0.08}},
      {{1.0, 0.30, 0.10}},
      {{1.0, 0.15, 0.05}, {0.60, 0.35, 0.06}, {0.25, 0.65, 0.10}},
      {{1.0, 0.25, 0.08}, {-0.30, 0.60, 0.07}},
      {{0.7, 0.20, 0.05}, {1.0, 0.40, 0.07}},
      {{1.0, 0.35, 0.12}, {0.30, 0.70, 0.05}},
  };
  for (int i = 0; i < 6; ++i) {
    p[i].id = i;
    p[i].heart_rate_hz = hr[i];
    p[i].hrv_std = 0.02;
    p[i].pulse_template = templates[static_cast<std::size_t>(i)];
    p[i].resp_rate_hz = rr[i];
    p[i].resp_amp_m = resp_amp[i];
    p[i].heart_amp_m = heart_amp[i];
    p[i].am_depth = am[i];
  }
  return p;
}

std::vector<PersonProfile> hard_profiles() {
  std::vector<PersonProfile> p(6);
  // Heart rates sit closer together than the session drift, so rate alone cannot separate them.
  const double hr[] = {1.10, 1.13, 1.16, 1.19, 1.22, 1.25};
  const double rr[] = {0.22, 0.25, 0.28, 0.24, 0.27, 0.23};
  const double heart_amp[] = {1.4e-4, 1.1e-4, 1.6e-4, 1.2e-4, 1.8e-4, 1.3e-4};
  const double am[] = {0.30, 0.40, 0.35, 0.45, 0.32, 0.38};
  // Reflectivity follows its own beat-locked waveform, unlike the displacement pulse.
  const std::vector<std::vector<PulseLobe>> am_templates = {
      {{1.0, 0.45, 0.15}},
      {{1.0, 0.15, 0.05}, {-0.6, 0.45, 0.08}},
      {{0.6, 0.30, 0.10}, {0.6, 0.70, 0.10}},
      {{-1.0, 0.35, 0.12}},
      {{1.0, 0.10, 0.04}, {0.8, 0.60, 0.15}},
      {{0.5, 0.25, 0.20}, {-0.5, 0.80, 0.05}},
  };
  const std::vector<std::vector<PulseLobe>> templates = {
      {{1.0, 0.22, 0.07}, {0.40, 0.52, 0.09}},
      {{1.0, 0.30, 0.10}, {0.20, 0.60, 0.08}},
      {{1.0, 0.18, 0.06}, {0.55, 0.38, 0.07}},
      {{1.0, 0.26, 0.08}, {-0.25, 0.58, 0.08}},
      {{0.8, 0.20, 0.06}, {1.0, 0.40, 0.08}},
      {{1.0, 0.32, 0.11}, {0.30, 0.66, 0.06}},
  };
  for (int i = 0; i < 6; ++i) {
    p[i].id = i;
    p[i].heart_rate_hz = hr[i];
    p[i].hrv_std = 0.03;
    p[i].pulse_template = templates[static_cast<std::size_t>(i)];
    p[i].resp_rate_hz = rr[i];
    p[i].resp_amp_m = 4.0e-3;
    p[i].heart_amp_m = heart_amp[i];
    p[i].am_depth = am[i];
    p[i].am_template = am_templates[static_cast<std::size_t>(i)];
  }
  return p;
}

}  // namespace hbid
