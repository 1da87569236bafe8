#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "hbid/io.hpp"
#include "test_util.hpp"

using namespace hbid;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hbid_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("I/Q files round trip at float32 precision") {
  const auto dir = scratch("iq");
  ComplexSeries s;
  s.fs = 100.0;
  for (int i = 0; i < 257; ++i) s.samples.emplace_back(0.25 * i - 3.0, 1.0 / (i + 1));
  io::write_iq(dir / "a.iq", s);
  CHECK(fs::file_size(dir / "a.iq") == 257 * 8);
  const auto back = io::read_iq(dir / "a.iq", 100.0, 257);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back.samples[i].real() == static_cast<float>(s.samples[i].real()));
    CHECK(back.samples[i].imag() == static_cast<float>(s.samples[i].imag()));
  }
  CHECK_CODE(io::read_iq(dir / "a.iq", 100.0, 300), ErrorCode::FormatError);
  CHECK_CODE(io::read_iq(dir / "missing.iq", 100.0, 1), ErrorCode::IoError);
}

TEST_CASE("cube files round trip exactly") {
  const auto dir = scratch("cube");
  DataCube c;
  c.config.n_fast = 8;
  c.config.n_virtual = 3;
  c.n_slow = 5;
  for (std::size_t i = 0; i < 5 * 3 * 8; ++i) c.values.emplace_back(static_cast<float>(i) * 0.5f, -static_cast<float>(i));
  io::write_cube(dir / "a.cube", c);
  const auto back = io::read_cube(dir / "a.cube", c.config, 5);
  CHECK(back.values == c.values);
  CHECK(back.index(1, 2, 3) == (1 * 3 + 2) * 8 + 3);
}

TEST_CASE("manifest round trip") {
  const auto dir = scratch("manifest");
  io::DatasetManifest m;
  m.dataset_id = "test";
  m.preset = "hard";
  m.snr_db = 10.0;
  m.profiles = hard_profiles();
  m.records.push_back({"p0.iq", 0, "d1-am", 1, 12345678901234567ULL, 6000});
  io::write_manifest(dir, m);
  const auto back = io::read_manifest(dir);
  CHECK(back.dataset_id == "test");
  CHECK(back.preset == "hard");
  CHECK(back.snr_db == 10.0);
  CHECK(back.records.size() == 1);
  CHECK(back.records[0].seed == 12345678901234567ULL);
  CHECK(io::to_json(back) == io::to_json(m));
  REQUIRE(back.profiles.size() == 6);
  CHECK(back.profiles[1].am_template.size() == 2);

  io::write_file(dir / "manifest.json", "{\"dataset_id\": 3}");
  CHECK_CODE(io::read_manifest(dir), ErrorCode::ManifestError);
  io::write_file(dir / "manifest.json", "not json");
  CHECK_CODE(io::read_manifest(dir), ErrorCode::ManifestError);
}

TEST_CASE("feature CSV round trip is exact") {
  std::vector<FeatureRow> rows(2);
  rows[0] = {"p0-d1-am-r1-s0", 0, "d1-am", 0, FeatureVector{{0.1, -1e-300, 3.0e17}, FeatureKind::amp, 1}};
  rows[1] = {"p1-d1-pm-r2-s3", 1, "d1-pm", 3, FeatureVector{{1.0 / 3.0, 2.5, -0.0}, FeatureKind::amp, 1}};
  std::stringstream ss;
  io::write_features_csv(ss, rows);
  CHECK(ss.str().rfind("sample_id,label,session_id,segment_index,kind,f0,f1,f2\n", 0) == 0);
  const auto back = io::read_features_csv(ss);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].sample_id == rows[i].sample_id);
    CHECK(back[i].label == rows[i].label);
    CHECK(back[i].session_id == rows[i].session_id);
    CHECK(back[i].segment_index == rows[i].segment_index);
    CHECK(back[i].features.kind == FeatureKind::amp);
    CHECK(back[i].features.values == rows[i].features.values);
  }

  std::stringstream headless("p0,0,d1-am,0,amp,1.0\n");
  CHECK_CODE(io::read_features_csv(headless), ErrorCode::FormatError);
  std::stringstream ragged("sample_id,label,session_id,segment_index,kind,f0\np0,0,d1-am,0,amp\n");
  CHECK_CODE(io::read_features_csv(ragged), ErrorCode::FormatError);
  std::stringstream bad("sample_id,label,session_id,segment_index,kind,f0\np0,0,d1-am,0,amp,x\n");
  CHECK_CODE(io::read_features_csv(bad), ErrorCode::FormatError);
}

TEST_CASE("model JSON reproduces predictions bit for bit") {
  LabeledDataset d;
  for (int i = 0; i < 30; ++i) {
    const int c = i % 3;
    d.features.append_row(std::vector<double>{c + 0.1 * (i % 7), 0.3 * c - 0.05 * (i % 5), 1.0});
    d.labels.push_back(c);
    d.sessions.push_back("s" + std::to_string(i % 2));
  }
  const auto model = train_multiclass(d, TrainOptions{});
  const auto j = io::model_to_json(model, FeatureKind::comp, "abc");
  CHECK(j.at("training_manifest_hash") == "abc");
  const auto back = io::model_from_json(nlohmann::json::parse(j.dump()));
  CHECK(predict(back, d.features).scores.data == predict(model, d.features).scores.data);
  CHECK_CODE(io::model_from_json(nlohmann::json::object()), ErrorCode::FormatError);
}

TEST_CASE("report outputs") {
  EvalReport r;
  r.classes = {0, 1};
  r.confusion = {{3, 1}, {0, 4}};
  r.accuracy = 87.5;
  std::stringstream csv;
  io::write_confusion_csv(csv, r);
  CHECK(csv.str() == "true\\predicted,0,1\n0,3,1\n1,0,4\n");
  std::stringstream svg;
  io::write_confusion_svg(svg, r, "t");
  CHECK(svg.str().find("<svg") == 0);

  Projection2D p;
  p.points = Matrix(2, 2);
  p.points(1, 0) = 0.5;
  p.labels = {0, 1};
  std::stringstream pc;
  io::write_projection_csv(pc, p, {"a", "b"});
  CHECK(pc.str() == "sample_id,label,x,y\na,0,0,0\nb,1,0.5,0\n");
  CHECK_CODE(io::write_projection_csv(pc, p, {"a"}), ErrorCode::LengthMismatch);
}

TEST_CASE("fnv1a") {
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
}
