#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbid/classify.hpp"
#include "hbid/embedding.hpp"
#include "hbid/pipeline.hpp"
#include "hbid/radar.hpp"
#include "hbid/synth.hpp"

namespace hbid::io {

namespace fs = std::filesystem;

// Raw I/Q: little-endian float32, interleaved (I, Q).
void write_iq(const fs::path& path, const ComplexSeries& s);
ComplexSeries read_iq(const fs::path& path, double fs, std::size_t n_samples);

// Cube: little-endian float32 I/Q; fast time fastest, then element, then slow time.
void write_cube(const fs::path& path, const DataCube& cube);
DataCube read_cube(const fs::path& path, const RadarConfig& cfg, std::size_t n_slow);

struct ManifestRecord {
  std::string file;
  int label = 0;
  std::string session_id;
  int repetition = 1;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;  ///< slow-time samples
};

struct DatasetManifest {
  std::string dataset_id;
  double fs = 100.0;
  double duration = 60.0;
  SignalMode mode = SignalMode::baseband;
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  std::string preset;
  RadarConfig radar;
  std::vector<PersonProfile> profiles;
  std::vector<ManifestRecord> records;
};

nlohmann::json to_json(const RadarConfig& cfg);
RadarConfig radar_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PersonProfile& p);
PersonProfile profile_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const fs::path& dir, const DatasetManifest& m);
DatasetManifest read_manifest(const fs::path& dir);

Measurement load_measurement(const fs::path& dir, const DatasetManifest& m, const ManifestRecord& rec);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_features_csv(std::ostream& os, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_features_csv(std::istream& is);

nlohmann::json model_to_json(const SvmModel& model, FeatureKind kind, const std::string& manifest_hash);
SvmModel model_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EvalReport& r, FeatureKind kind);
void write_confusion_csv(std::ostream& os, const EvalReport& r);
void write_confusion_svg(std::ostream& os, const EvalReport& r, const std::string& title);

void write_projection_csv(std::ostream& os, const Projection2D& p, const std::vector<std::string>& sample_ids);
void write_projection_svg(std::ostream& os, const Projection2D& p, const std::string& title);

/// FNV-1a 64 of a byte string, hex encoded.
std::string fnv1a_hex(const std::string& bytes);
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& bytes);

}  // namespace hbid::io
