#include "hbid/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hbid/error.hpp"

namespace hbid::io {
namespace {

using nlohmann::json;

void put_f32(std::string& buf, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  char bytes[4];
  std::memcpy(bytes, &bits, 4);
  buf.append(bytes, 4);
}

float get_f32(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

std::string read_exact(const fs::path& path, std::size_t bytes) {
  std::string data = read_file(path);
  if (data.size() != bytes) {
    throw Error(ErrorCode::FormatError, path.string() + ": expected " + std::to_string(bytes) +
                                            " bytes, found " + std::to_string(data.size()));
  }
  return data;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, std::size_t line_no) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

void write_iq(const fs::path& path, const ComplexSeries& s) {
  std::string buf;
  buf.reserve(s.size() * 8);
  for (const auto& z : s.samples) {
    put_f32(buf, static_cast<float>(z.real()));
    put_f32(buf, static_cast<float>(z.imag()));
  }
  write_file(path, buf);
}

ComplexSeries read_iq(const fs::path& path, double fs, std::size_t n_samples) {
  const std::string data = read_exact(path, n_samples * 8);
  ComplexSeries s;
  s.fs = fs;
  s.samples.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    s.samples[i] = {get_f32(&data[8 * i]), get_f32(&data[8 * i + 4])};
  }
  return s;
}

void write_cube(const fs::path& path, const DataCube& cube) {
  std::string buf;
  buf.reserve(cube.values.size() * 8);
  for (const auto& z : cube.values) {
    put_f32(buf, z.real());
    put_f32(buf, z.imag());
  }
  write_file(path, buf);
}

DataCube read_cube(const fs::path& path, const RadarConfig& cfg, std::size_t n_slow) {
  DataCube cube;
  cube.config = cfg;
  cube.n_slow = n_slow;
  const std::size_t count = n_slow * cube.n_elements() * cube.n_fast();
  const std::string data = read_exact(path, count * 8);
  cube.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) cube.values[i] = {get_f32(&data[8 * i]), get_f32(&data[8 * i + 4])};
  return cube;
}

json to_json(const RadarConfig& c) {
  return json{{"fc", c.fc},
              {"wavelength", c.wavelength},
              {"bandwidth", c.bandwidth},
              {"chirp_duration", c.chirp_duration},
              {"n_virtual", c.n_virtual},
              {"element_spacing", c.element_spacing},
              {"fs_slow", c.fs_slow},
              {"n_fast", c.n_fast}};
}

RadarConfig radar_from_json(const json& j) {
  RadarConfig c;
  c.fc = j.at("fc").get<double>();
  c.wavelength = j.at("wavelength").get<double>();
  c.bandwidth = j.at("bandwidth").get<double>();
  c.chirp_duration = j.at("chirp_duration").get<double>();
  c.n_virtual = j.at("n_virtual").get<int>();
  c.element_spacing = j.at("element_spacing").get<double>();
  c.fs_slow = j.at("fs_slow").get<double>();
  c.n_fast = j.at("n_fast").get<int>();
  return c;
}

json lobes_to_json(const std::vector<PulseLobe>& lobes) {
  json out = json::array();
  for (const auto& l : lobes) {
    out.push_back({{"amplitude", l.amplitude}, {"center", l.center}, {"width", l.width}});
  }
  return out;
}

std::vector<PulseLobe> lobes_from_json(const json& j) {
  std::vector<PulseLobe> out;
  for (const auto& l : j) {
    out.push_back({l.at("amplitude").get<double>(), l.at("center").get<double>(),
                   l.at("width").get<double>()});
  }
  return out;
}

json to_json(const PersonProfile& p) {
  return json{{"id", p.id},
              {"heart_rate_hz", p.heart_rate_hz},
              {"hrv_std", p.hrv_std},
              {"pulse_template", lobes_to_json(p.pulse_template)},
              {"am_template", lobes_to_json(p.am_template)},
              {"resp_rate_hz", p.resp_rate_hz},
              {"resp_amp_m", p.resp_amp_m},
              {"heart_amp_m", p.heart_amp_m},
              {"am_depth", p.am_depth},
              {"drift_amp_m", p.drift_amp_m}};
}

PersonProfile profile_from_json(const json& j) {
  PersonProfile p;
  p.id = j.at("id").get<int>();
  p.heart_rate_hz = j.at("heart_rate_hz").get<double>();
  p.hrv_std = j.at("hrv_std").get<double>();
  p.pulse_template = lobes_from_json(j.at("pulse_template"));
  if (j.contains("am_template")) p.am_template = lobes_from_json(j.at("am_template"));
  p.resp_rate_hz = j.at("resp_rate_hz").get<double>();
  p.resp_amp_m = j.at("resp_amp_m").get<double>();
  p.heart_amp_m = j.at("heart_amp_m").get<double>();
  p.am_depth = j.value("am_depth", 0.0);
  p.drift_amp_m = j.value("drift_amp_m", 0.0);
  return p;
}

json to_json(const DatasetManifest& m) {
  json profiles = json::array();
  for (const auto& p : m.profiles) profiles.push_back(to_json(p));
  json records = json::array();
  for (const auto& r : m.records) {
    records.push_back({{"file", r.file},
                       {"label", r.label},
                       {"session_id", r.session_id},
                       {"repetition", r.repetition},
                       {"seed", r.seed},
                       {"n_samples", r.n_samples}});
  }
  return json{{"dataset_id", m.dataset_id},
              {"fs", m.fs},
              {"duration", m.duration},
              {"mode", m.mode == SignalMode::baseband ? "baseband" : "cube"},
              {"snr_db", m.snr_db},
              {"seed", m.seed},
              {"preset", m.preset},
              {"radar", to_json(m.radar)},
              {"profiles", profiles},
              {"records", records}};
}

DatasetManifest manifest_from_json(const json& j) {
  try {
    DatasetManifest m;
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.fs = j.at("fs").get<double>();
    m.duration = j.at("duration").get<double>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "baseband") m.mode = SignalMode::baseband;
    else if (mode == "cube") m.mode = SignalMode::cube;
    else throw Error(ErrorCode::ManifestError, "unknown mode '" + mode + "'");
    m.snr_db = j.value("snr_db", 20.0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.preset = j.value("preset", std::string{});
    m.radar = radar_from_json(j.at("radar"));
    for (const auto& p : j.at("profiles")) m.profiles.push_back(profile_from_json(p));
    for (const auto& r : j.at("records")) {
      ManifestRecord rec;
      rec.file = r.at("file").get<std::string>();
      rec.label = r.at("label").get<int>();
      rec.session_id = r.at("session_id").get<std::string>();
      rec.repetition = r.at("repetition").get<int>();
      rec.seed = r.at("seed").get<std::uint64_t>();
      rec.n_samples = r.at("n_samples").get<std::size_t>();
      m.records.push_back(rec);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ManifestError, e.what());
  }
}

void write_manifest(const fs::path& dir, const DatasetManifest& m) {
  write_file(dir / "manifest.json", to_json(m).dump(2) + "\n");
}

DatasetManifest read_manifest(const fs::path& dir) {
  const auto text = read_file(dir / "manifest.json");
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ManifestError, e.what());
  }
  return manifest_from_json(j);
}

Measurement load_measurement(const fs::path& dir, const DatasetManifest& m, const ManifestRecord& rec) {
  Measurement out;
  out.label = rec.label;
  out.session = SessionId::parse(rec.session_id);
  out.repetition = rec.repetition;
  out.seed = rec.seed;
  if (m.mode == SignalMode::baseband) {
    out.signal = read_iq(dir / rec.file, m.fs, rec.n_samples);
  } else {
    RadarConfig rc = m.radar;
    rc.fs_slow = m.fs;
    out.signal = read_cube(dir / rec.file, rc, rec.n_samples);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorCode::FormatError, "cannot format double");
  return std::string(buf, ptr);
}

void write_features_csv(std::ostream& os, const std::vector<FeatureRow>& rows) {
  const std::size_t dims = rows.empty() ? 0 : rows.front().features.values.size();
  os << "sample_id,label,session_id,segment_index,kind";
  for (std::size_t k = 0; k < dims; ++k) os << ",f" << k;
  os << '\n';
  for (const auto& r : rows) {
    if (r.features.values.size() != dims) {
      throw Error(ErrorCode::DimensionMismatch, "row " + r.sample_id + " differs in feature width");
    }
    os << r.sample_id << ',' << r.label << ',' << r.session_id << ',' << r.segment_index << ','
       << to_string(r.features.kind);
    for (double v : r.features.values) os << ',' << format_double(v);
    os << '\n';
  }
}

std::vector<FeatureRow> read_features_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::FormatError, "feature CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 5 || header[0] != "sample_id" || header[1] != "label" || header[2] != "session_id" ||
      header[3] != "segment_index" || header[4] != "kind") {
    throw Error(ErrorCode::FormatError, "feature CSV header must start with sample_id,label,session_id,segment_index,kind");
  }
  const std::size_t dims = header.size() - 5;
  std::vector<FeatureRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(header.size()) + " columns, got " +
                                              std::to_string(cells.size()));
    }
    FeatureRow r;
    r.sample_id = cells[0];
    r.label = parse_int(cells[1], line_no);
    r.session_id = cells[2];
    r.segment_index = parse_int(cells[3], line_no);
    r.features.kind = feature_kind_from_string(cells[4]);
    r.features.values.reserve(dims);
    for (std::size_t k = 0; k < dims; ++k) r.features.values.push_back(parse_double(cells[5 + k], line_no));
    const std::size_t per = feature_dimension(r.features.kind, 1);
    r.features.k_prime = per > 0 ? static_cast<int>(dims / per) : 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

json model_to_json(const SvmModel& model, FeatureKind kind, const std::string& manifest_hash) {
  json machines = json::array();
  const bool binary = model.classes.size() == 2;
  for (std::size_t c = 0; c < model.machines.size(); ++c) {
    const auto& m = model.machines[c];
    json svs = json::array();
    for (std::size_t i = 0; i < m.support_vectors.rows; ++i) {
      auto r = m.support_vectors.row(i);
      svs.push_back(std::vector<double>(r.begin(), r.end()));
    }
    machines.push_back({{"positive_class", model.classes[binary ? 1 : c]},
                        {"bias", m.bias},
                        {"coef", m.coef},
                        {"support_vectors", svs},
                        {"iterations", m.iterations}});
  }
  return json{{"format", "hbid-svm-1"},
              {"feature_kind", std::string(to_string(kind))},
              {"kernel", {{"type", model.kernel.type == KernelType::rbf ? "rbf" : "linear"},
                          {"gamma", model.kernel.gamma}}},
              {"C", model.C},
              {"standardize", model.standardize},
              {"standardizer", {{"mean", model.standardizer.mean}, {"std", model.standardizer.stddev}}},
              {"classes", model.classes},
              {"scheme", binary ? "binary" : "one-vs-rest"},
              {"machines", machines},
              {"training_manifest_hash", manifest_hash}};
}

SvmModel model_from_json(const json& j) {
  try {
    SvmModel model;
    const auto type = j.at("kernel").at("type").get<std::string>();
    model.kernel.type = type == "rbf" ? KernelType::rbf : KernelType::linear;
    model.kernel.gamma = j.at("kernel").at("gamma").get<double>();
    model.C = j.at("C").get<double>();
    model.standardize = j.at("standardize").get<bool>();
    model.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    model.standardizer.stddev = j.at("standardizer").at("std").get<std::vector<double>>();
    model.classes = j.at("classes").get<std::vector<int>>();
    for (const auto& mj : j.at("machines")) {
      BinaryMachine m;
      m.kernel = model.kernel;
      m.C = model.C;
      m.bias = mj.at("bias").get<double>();
      m.coef = mj.at("coef").get<std::vector<double>>();
      m.iterations = mj.value("iterations", 0L);
      m.support_vectors.cols = model.standardizer.mean.size();
      for (const auto& sv : mj.at("support_vectors")) m.support_vectors.append_row(sv.get<std::vector<double>>());
      model.machines.push_back(std::move(m));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("model file: ") + e.what());
  }
}

json report_to_json(const EvalReport& r, FeatureKind kind) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"session", f.session}, {"n_train", f.n_train}, {"n_val", f.n_val}, {"accuracy", f.accuracy}});
  }
  return json{{"feature_kind", std::string(to_string(kind))},
              {"n_samples", r.true_labels.size()},
              {"classes", r.classes},
              {"accuracy", r.accuracy},
              {"macro_auc", r.macro_auc},
              {"per_class_accuracy", r.per_class_accuracy},
              {"per_class_auc", r.per_class_auc},
              {"confusion", r.confusion},
              {"folds", folds}};
}

void write_confusion_csv(std::ostream& os, const EvalReport& r) {
  os << "true\\predicted";
  for (int c : r.classes) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    os << r.classes[i];
    for (long v : r.confusion[i]) os << ',' << v;
    os << '\n';
  }
}

void write_confusion_svg(std::ostream& os, const EvalReport& r, const std::string& title) {
  const std::size_t k = r.classes.size();
  const int cell = 48, margin = 70;
  const int size = margin + static_cast<int>(k) * cell + 20;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  for (std::size_t i = 0; i < k; ++i) {
    long row_total = 0;
    for (long v : r.confusion[i]) row_total += v;
    for (std::size_t j = 0; j < k; ++j) {
      const double frac = row_total > 0 ? static_cast<double>(r.confusion[i][j]) / static_cast<double>(row_total) : 0.0;
      const int shade = 255 - static_cast<int>(frac * 200.0);
      const int x = margin + static_cast<int>(j) * cell;
      const int y = margin + static_cast<int>(i) * cell;
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
         << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#888\"/>\n";
      os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\">"
         << r.confusion[i][j] << "</text>\n";
    }
    os << "<text x=\"" << margin - 8 << "\" y=\"" << margin + static_cast<int>(i) * cell + cell / 2 + 4
       << "\" text-anchor=\"end\">" << r.classes[i] << "</text>\n";
    os << "<text x=\"" << margin + static_cast<int>(i) * cell + cell / 2 << "\" y=\"" << margin - 8
       << "\" text-anchor=\"middle\">" << r.classes[i] << "</text>\n";
  }
  os << "<text x=\"" << margin << "\" y=\"" << size + 10 << "\">rows: true, columns: predicted</text>\n";
  os << "</svg>\n";
}

void write_projection_csv(std::ostream& os, const Projection2D& p, const std::vector<std::string>& sample_ids) {
  if (sample_ids.size() != p.points.rows || p.labels.size() != p.points.rows) {
    throw Error(ErrorCode::LengthMismatch, "projection rows, labels and ids differ in length");
  }
  os << "sample_id,label,x,y\n";
  for (std::size_t i = 0; i < p.points.rows; ++i) {
    os << sample_ids[i] << ',' << p.labels[i] << ',' << format_double(p.points(i, 0)) << ','
       << format_double(p.points(i, 1)) << '\n';
  }
}

void write_projection_svg(std::ostream& os, const Projection2D& p, const std::string& title) {
  const double w = 480, h = 480, pad = 30;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (p.points.rows > 0) {
    xmin = xmax = p.points(0, 0);
    ymin = ymax = p.points(0, 1);
    for (std::size_t i = 0; i < p.points.rows; ++i) {
      xmin = std::min(xmin, p.points(i, 0));
      xmax = std::max(xmax, p.points(i, 0));
      ymin = std::min(ymin, p.points(i, 1));
      ymax = std::max(ymax, p.points(i, 1));
    }
  }
  const double sx = xmax > xmin ? (w - 2 * pad) / (xmax - xmin) : 1.0;
  const double sy = ymax > ymin ? (h - 2 * pad) / (ymax - ymin) : 1.0;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << pad << "\" y=\"18\" font-size=\"14\">" << title << "</text>\n";
  for (std::size_t i = 0; i < p.points.rows; ++i) {
    const int label = i < p.labels.size() ? p.labels[i] : 0;
    const char* colour = kPalette[static_cast<std::size_t>(std::abs(label)) % 10];
    os << "<circle cx=\"" << format_double(pad + (p.points(i, 0) - xmin) * sx) << "\" cy=\""
       << format_double(h - pad - (p.points(i, 1) - ymin) * sy) << "\" r=\"3\" fill=\"" << colour
       << "\" fill-opacity=\"0.7\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace hbid::io
