// hbid: synthesize radar cohorts, extract cepstral features, train and evaluate SVMs,
// project features to 2-D and summarize reports.
//
// Exit codes: 0 ok, 1 usage, 2 data, 3 internal.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hbid/embedding.hpp"
#include "hbid/error.hpp"
#include "hbid/io.hpp"
#include "hbid/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hbid;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

/// Bad parameter values found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

/// Runs a module validate() and reports failures as usage errors.
template <typename F>
void check_config(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  io::write_file(path, text);
}

std::vector<FeatureRow> load_features(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  auto rows = io::read_features_csv(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, path.string() + " has no rows");
  return rows;
}

// ---------------------------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::string preset = "default";
  std::string profiles_file;
  std::string mode = "baseband";
  double snr_db = 20.0;
  double duration = 60.0;
  double fs = 100.0;
  int days = 5;
  int reps = 5;
  std::uint64_t seed = 1;
  double range_m = 1.5;
  double angle_deg = 0.0;
  double clutter = 0.0;
  bool fixed_phase = false;
};

int run_synth(const SynthArgs& a) {
  require(a.mode == "baseband" || a.mode == "cube", "--mode must be baseband or cube");
  require(a.days >= 1 && a.reps >= 1, "--days and --reps must be at least 1");
  require(a.duration > 0.0 && a.fs > 0.0, "--duration and --fs must be positive");

  std::vector<PersonProfile> profiles;
  std::string preset = a.preset;
  if (!a.profiles_file.empty()) {
    json j;
    try {
      j = json::parse(io::read_file(a.profiles_file));
      for (const auto& p : j) profiles.push_back(io::profile_from_json(p));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidProfile, a.profiles_file + ": " + e.what());
    }
    preset = "custom";
  } else if (a.preset == "default") {
    profiles = default_profiles();
  } else if (a.preset == "hard") {
    profiles = hard_profiles();
  } else {
    throw UsageError("--preset must be default or hard");
  }

  CohortConfig cfg;
  cfg.duration = a.duration;
  cfg.fs = a.fs;
  cfg.snr_db = a.snr_db;
  cfg.seed = a.seed;
  cfg.mode = a.mode == "cube" ? SignalMode::cube : SignalMode::baseband;
  cfg.radar.fs_slow = a.fs;
  cfg.range_m = a.range_m;
  cfg.angle_deg = a.angle_deg;
  cfg.nuisance.clutter_amp = a.clutter;
  cfg.nuisance.random_phase = !a.fixed_phase;
  check_config([&] { cfg.radar.validate(); });

  const Schedule schedule{a.days, a.reps};
  const auto cohort = generate_cohort(profiles, schedule, cfg);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::DatasetManifest manifest;
  manifest.dataset_id = preset + "-" + a.mode + "-seed" + std::to_string(a.seed);
  manifest.fs = a.fs;
  manifest.duration = a.duration;
  manifest.mode = cfg.mode;
  manifest.snr_db = a.snr_db;
  manifest.seed = a.seed;
  manifest.preset = preset;
  manifest.radar = cfg.radar;
  manifest.profiles = profiles;

  std::map<int, int> per_class;
  std::map<std::string, int> per_session;
  for (const auto& m : cohort) {
    io::ManifestRecord rec;
    rec.label = m.label;
    rec.session_id = m.session.str();
    rec.repetition = m.repetition;
    rec.seed = m.seed;
    const std::string stem = "p" + std::to_string(m.label) + "-" + rec.session_id + "-r" + std::to_string(m.repetition);
    if (const auto* s = std::get_if<ComplexSeries>(&m.signal)) {
      rec.file = stem + ".iq";
      rec.n_samples = s->size();
      io::write_iq(dir / rec.file, *s);
    } else {
      const auto& cube = std::get<DataCube>(m.signal);
      rec.file = stem + ".cube";
      rec.n_samples = cube.n_slow;
      io::write_cube(dir / rec.file, cube);
    }
    manifest.records.push_back(rec);
    ++per_class[m.label];
    ++per_session[rec.session_id];
  }
  io::write_manifest(dir, manifest);

  std::printf("dataset %s: %zu measurements, %zu classes, %zu sessions, %s, %.1f s at %.1f Hz, %.1f dB\n",
              manifest.dataset_id.c_str(), cohort.size(), per_class.size(), per_session.size(), a.mode.c_str(),
              a.duration, a.fs, a.snr_db);
  std::printf("per class:");
  for (const auto& [label, n] : per_class) std::printf(" %d:%d", label, n);
  std::printf("\nper session:");
  for (const auto& [session, n] : per_session) std::printf(" %s:%d", session.c_str(), n);
  std::printf("\n");
  return 0;
}

// ---------------------------------------------------------------------------------------------

struct ExtractArgs {
  std::string data;
  std::string out;
  std::string kind = "prop";
  double segment = 0.0;
  int k_prime = 24;
  int K = 64;
  int L = 64;
  double f_ref = 5.0;
  double f_prime = 1000.0;
  double window = 2.0;
  double hop = 0.1;
  bool no_log = false;
  double range_lo = 0.5;
  double range_hi = 3.0;
};

int run_extract(const ExtractArgs& a) {
  FeatureKind kind{};
  check_config([&] { kind = feature_kind_from_string(a.kind); });
  require(a.segment >= 0.0, "--segment must be non-negative");
  require(a.range_hi > a.range_lo, "--range-hi must exceed --range-lo");

  const fs::path dir(a.data);
  const auto manifest = io::read_manifest(dir);
  ExtractionConfig cfg;
  cfg.K = a.K;
  cfg.k_prime = a.k_prime;
  cfg.mel.L = a.L;
  cfg.mel.f_ref = a.f_ref;
  cfg.mel.f_prime = a.f_prime;
  cfg.mel.fs = manifest.fs;
  cfg.stft.window_len = a.window;
  cfg.stft.hop = a.hop;
  cfg.log_energies = !a.no_log;
  check_config([&] { cfg.validate(); });

  std::vector<Measurement> measurements;
  measurements.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) measurements.push_back(io::load_measurement(dir, manifest, rec));
  const auto rows = extract_rows(measurements, cfg, kind, a.segment, RangeWindow{a.range_lo, a.range_hi});

  std::ostringstream out;
  io::write_features_csv(out, rows);
  write_text(a.out, out.str());
  std::printf("%zu rows x %zu %s features -> %s\n", rows.size(), rows.front().features.values.size(),
              a.kind.c_str(), a.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------------------------

struct SvmArgs {
  std::string kernel = "rbf";
  double C = 10.0;
  double gamma = 0.0;
  double tol = 1e-3;
  bool no_standardize = false;

  TrainOptions options() const {
    require(kernel == "rbf" || kernel == "linear", "--kernel must be rbf or linear");
    require(C > 0.0, "--C must be positive");
    require(gamma >= 0.0, "--gamma must be non-negative");
    require(tol > 0.0, "--tol must be positive");
    TrainOptions o;
    o.kernel = kernel == "rbf" ? KernelType::rbf : KernelType::linear;
    o.C = C;
    o.gamma = gamma;
    o.tol = tol;
    o.standardize = !no_standardize;
    return o;
  }
};

void add_svm_options(CLI::App* cmd, SvmArgs& a) {
  cmd->add_option("--kernel", a.kernel, "rbf or linear")->capture_default_str();
  cmd->add_option("--C", a.C, "box constraint")->capture_default_str();
  cmd->add_option("--gamma", a.gamma, "RBF width; 0 picks 1 / (d * variance)")->capture_default_str();
  cmd->add_option("--tol", a.tol, "SMO stopping tolerance")->capture_default_str();
  cmd->add_flag("--no-standardize", a.no_standardize, "skip per-dimension z-scoring");
}

FeatureKind rows_kind(const std::vector<FeatureRow>& rows) {
  const FeatureKind kind = rows.front().features.kind;
  for (const auto& r : rows) {
    if (r.features.kind != kind) throw Error(ErrorCode::KindMismatch, "feature CSV mixes kinds");
  }
  return kind;
}

struct TrainArgs {
  std::string features;
  std::string out;
  std::string manifest;
  SvmArgs svm;
};

int run_train(const TrainArgs& a) {
  const auto options = a.svm.options();
  const auto rows = load_features(a.features);
  const FeatureKind kind = rows_kind(rows);
  const auto data = to_dataset(rows);
  std::string manifest_hash;
  if (!a.manifest.empty()) {
    const fs::path p = fs::is_directory(a.manifest) ? fs::path(a.manifest) / "manifest.json" : fs::path(a.manifest);
    manifest_hash = io::fnv1a_hex(io::read_file(p));
  }
  const auto model = train_multiclass(data, options);
  auto j = io::model_to_json(model, kind, manifest_hash);
  j["training_features_hash"] = io::fnv1a_hex(io::read_file(a.features));
  j["n_training_rows"] = data.size();
  write_text(a.out, j.dump(1) + "\n");
  std::size_t svs = 0;
  for (const auto& m : model.machines) svs += m.support_vectors.rows;
  std::printf("%zu machines, %zu support vectors in total, %zu rows x %zu dims -> %s\n", model.machines.size(), svs,
              data.size(), data.features.cols, a.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------------------------

struct EvalArgs {
  std::string features;
  std::string out_dir;
  std::string model;
  bool svg = false;
  bool no_timestamp = false;
  SvmArgs svm;
};

int run_eval(const EvalArgs& a) {
  const auto options = a.svm.options();
  const auto rows = load_features(a.features);
  const FeatureKind kind = rows_kind(rows);
  const auto data = to_dataset(rows);

  EvalReport report;
  json j;
  if (a.model.empty()) {
    report = session_grouped_cv(data, options);
    j = io::report_to_json(report, kind);
    j["protocol"] = "session-grouped-cv";
  } else {
    json mj;
    try {
      mj = json::parse(io::read_file(a.model));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError, a.model + ": " + e.what());
    }
    const auto model = io::model_from_json(mj);
    if (mj.value("feature_kind", std::string(to_string(kind))) != to_string(kind)) {
      throw Error(ErrorCode::KindMismatch, "model was trained on " + mj.value("feature_kind", std::string()) +
                                               " features, CSV holds " + std::string(to_string(kind)));
    }
    const auto pred = predict(model, data.features);
    report = metrics(data.labels, pred.labels, pred.scores, model.classes);
    j = io::report_to_json(report, kind);
    j["protocol"] = "held-out";
    j["model_hash"] = io::fnv1a_hex(io::read_file(a.model));
  }
  j["features_hash"] = io::fnv1a_hex(io::read_file(a.features));
  if (!a.no_timestamp) j["generated_at"] = utc_now();

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_text(dir / "report.json", j.dump(1) + "\n");
  std::ostringstream csv;
  io::write_confusion_csv(csv, report);
  write_text(dir / "confusion.csv", csv.str());
  if (a.svg) {
    std::ostringstream svg;
    io::write_confusion_svg(svg, report, std::string(to_string(kind)) + " confusion");
    write_text(dir / "confusion.svg", svg.str());
  }
  std::printf("%s: accuracy %.2f%%, macro AUC %.4f over %zu samples -> %s\n", std::string(to_string(kind)).c_str(),
              report.accuracy, report.macro_auc, data.size(), dir.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------------------------

struct ProjectArgs {
  std::string features;
  std::string out;
  std::string svg;
  std::string method = "tsne";
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 0.0;
  std::uint64_t seed = 1;
  bool standardize = false;
};

int run_project(const ProjectArgs& a) {
  require(a.method == "pca" || a.method == "tsne", "--method must be pca or tsne");
  require(a.iterations >= 1, "--iterations must be at least 1");
  require(a.perplexity > 0.0, "--perplexity must be positive");
  const auto rows = load_features(a.features);
  const auto data = to_dataset(rows);
  Matrix x = a.standardize ? standardize_fit_transform(data.features).data : data.features;
  Projection2D p;
  if (a.method == "pca") {
    p = pca2(x, data.labels);
  } else {
    TsneOptions o;
    o.perplexity = a.perplexity;
    o.iterations = a.iterations;
    o.learning_rate = a.learning_rate;
    o.seed = a.seed;
    p = tsne2(x, o, data.labels);
  }
  std::vector<std::string> ids;
  for (const auto& r : rows) ids.push_back(r.sample_id);
  std::ostringstream csv;
  io::write_projection_csv(csv, p, ids);
  write_text(a.out, csv.str());
  if (!a.svg.empty()) {
    std::ostringstream svg;
    io::write_projection_svg(svg, p, a.method + " of " + std::string(to_string(rows.front().features.kind)) + " features");
    write_text(a.svg, svg.str());
  }
  if (a.method == "pca") {
    std::printf("pca: %zu points, explained variance %.3f / %.3f -> %s\n", p.points.rows, p.explained_variance_ratio[0],
                p.explained_variance_ratio[1], a.out.c_str());
  } else {
    std::printf("tsne: %zu points, KL %.4f -> %s\n", p.points.rows, p.kl_divergence, a.out.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int run_report(const ReportArgs& a) {
  std::ostringstream csv;
  csv << "report,feature_kind,protocol,n_samples,accuracy,macro_auc\n";
  std::printf("%-28s %-6s %-20s %8s %9s %9s\n", "report", "kind", "protocol", "samples", "accuracy", "macro_auc");
  for (const auto& path : a.inputs) {
    json j;
    try {
      j = json::parse(io::read_file(path));
      const auto kind = j.at("feature_kind").get<std::string>();
      const auto protocol = j.value("protocol", std::string("session-grouped-cv"));
      const auto n = j.at("n_samples").get<std::size_t>();
      const double acc = j.at("accuracy").get<double>();
      const double auc = j.at("macro_auc").get<double>();
      const auto name = fs::path(path).parent_path().filename().string();
      csv << name << ',' << kind << ',' << protocol << ',' << n << ',' << io::format_double(acc) << ','
          << io::format_double(auc) << '\n';
      std::printf("%-28s %-6s %-20s %8zu %9.2f %9.4f\n", name.c_str(), kind.c_str(), protocol.c_str(), n, acc, auc);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
  }
  if (!a.out.empty()) write_text(a.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar heartbeat identification: synthesis, cepstral features, SVM evaluation"};
  app.set_config("--config", "", "TOML/INI file; [synth], [extract], ... sections hold subcommand options");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic cohort (manifest + signal files)");
  s->add_option("--out", synth.out, "dataset directory")->required();
  s->add_option("--preset", synth.preset, "default or hard")->capture_default_str();
  s->add_option("--profiles", synth.profiles_file, "JSON array of person profiles (overrides --preset)");
  s->add_option("--mode", synth.mode, "baseband or cube")->capture_default_str();
  s->add_option("--snr", synth.snr_db, "per-sample SNR, dB")->capture_default_str();
  s->add_option("--duration", synth.duration, "measurement length, s")->capture_default_str();
  s->add_option("--fs", synth.fs, "slow-time rate, Hz")->capture_default_str();
  s->add_option("--days", synth.days, "recording days (two sessions each)")->capture_default_str();
  s->add_option("--reps", synth.reps, "repetitions per session")->capture_default_str();
  s->add_option("--seed", synth.seed, "master seed")->capture_default_str();
  s->add_option("--range", synth.range_m, "target range, m (cube mode)")->capture_default_str();
  s->add_option("--angle", synth.angle_deg, "target angle, degrees (cube mode)")->capture_default_str();
  s->add_option("--clutter", synth.clutter, "static reflector amplitude relative to the target")->capture_default_str();
  s->add_flag("--fixed-phase", synth.fixed_phase, "no per-session carrier phase offset");

  ExtractArgs extract;
  auto* e = app.add_subcommand("extract", "compute feature vectors for every measurement");
  e->add_option("--data", extract.data, "dataset directory")->required();
  e->add_option("--out", extract.out, "feature CSV")->required();
  e->add_option("--kind", extract.kind, "amp, ph, comp or prop")->capture_default_str();
  e->add_option("--segment", extract.segment, "split measurements into pieces of this length, s (0: whole)")
      ->capture_default_str();
  e->add_option("--k-prime", extract.k_prime, "cepstral coefficients kept per side")->capture_default_str();
  e->add_option("--K", extract.K, "cepstral coefficients computed per side")->capture_default_str();
  e->add_option("--L", extract.L, "mel filters")->capture_default_str();
  e->add_option("--f-ref", extract.f_ref, "mel reference frequency, Hz")->capture_default_str();
  e->add_option("--f-prime", extract.f_prime, "mel scale constant, Hz")->capture_default_str();
  e->add_option("--window", extract.window, "STFT window, s")->capture_default_str();
  e->add_option("--hop", extract.hop, "STFT hop, s")->capture_default_str();
  e->add_flag("--no-log", extract.no_log, "apply the DCT to mel energies without log compression");
  e->add_option("--range-lo", extract.range_lo, "echo search window start, m (cube)")->capture_default_str();
  e->add_option("--range-hi", extract.range_hi, "echo search window end, m (cube)")->capture_default_str();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "fit a one-vs-rest SVM on a feature CSV");
  t->add_option("--features", train.features, "feature CSV")->required();
  t->add_option("--out", train.out, "model JSON")->required();
  t->add_option("--manifest", train.manifest, "dataset directory or manifest.json to record in the model");
  add_svm_options(t, train.svm);

  EvalArgs eval;
  auto* v = app.add_subcommand("eval", "session-grouped cross-validation, or scoring of a trained model");
  v->add_option("--features", eval.features, "feature CSV")->required();
  v->add_option("--out-dir", eval.out_dir, "directory for report.json and confusion.csv")->required();
  v->add_option("--model", eval.model, "score this model instead of cross-validating");
  v->add_flag("--svg", eval.svg, "also write confusion.svg");
  v->add_flag("--no-timestamp", eval.no_timestamp, "omit generated_at so reruns are byte-identical");
  add_svm_options(v, eval.svm);

  ProjectArgs project;
  auto* p = app.add_subcommand("project", "2-D projection of a feature CSV");
  p->add_option("--features", project.features, "feature CSV")->required();
  p->add_option("--out", project.out, "projection CSV")->required();
  p->add_option("--svg", project.svg, "scatter plot");
  p->add_option("--method", project.method, "pca or tsne")->capture_default_str();
  p->add_option("--perplexity", project.perplexity, "t-SNE perplexity")->capture_default_str();
  p->add_option("--iterations", project.iterations, "t-SNE iterations")->capture_default_str();
  p->add_option("--learning-rate", project.learning_rate, "t-SNE step; 0 picks N / 12")->capture_default_str();
  p->add_option("--seed", project.seed, "t-SNE initial layout seed")->capture_default_str();
  p->add_flag("--standardize", project.standardize, "z-score features first");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "tabulate report.json files");
  r->add_option("inputs", report.inputs, "report.json files")->required();
  r->add_option("--out", report.out, "summary CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (s->parsed()) return run_synth(synth);
    if (e->parsed()) return run_extract(extract);
    if (t->parsed()) return run_train(train);
    if (v->parsed()) return run_eval(eval);
    if (p->parsed()) return run_project(project);
    if (r->parsed()) return run_report(report);
  } catch (const UsageError& err) {
    std::fprintf(stderr, "usage error: %s\n", err.what());
    return kExitUsage;
  } catch (const Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitData;
  } catch (const fs::filesystem_error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitData;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "internal error: %s\n", err.what());
    return kExitInternal;
  }
  return kExitInternal;
}
