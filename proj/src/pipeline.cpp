#include "hbid/pipeline.hpp"

#include <exception>
#include <string>

#include "hbid/error.hpp"

namespace hbid {

ComplexSeries measurement_signal(const Measurement& m, const RangeWindow& window) {
  if (const auto* s = std::get_if<ComplexSeries>(&m.signal)) return *s;
  return reconstruct_signal(std::get<DataCube>(m.signal), window).signal;
}

std::string sample_id(const Measurement& m) {
  return "p" + std::to_string(m.label) + "-" + m.session.str() + "-r" + std::to_string(m.repetition) +
         "-s" + std::to_string(m.segment_index);
}

namespace {

Error with_sample(const Error& e, const std::string& id) {
  std::string what = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
  return Error(e.code(), "sample " + id + ": " + what);
}

// Exceptions may not cross the parallel region; keep the lowest failing index and rethrow,
// prefixed with the sample id when one is given.
std::vector<FeatureVector> extract_parallel(const std::vector<ComplexSeries>& signals,
                                            const ExtractionConfig& cfg, FeatureKind kind,
                                            const std::vector<std::string>* ids) {
  cfg.validate();
  std::vector<FeatureVector> out(signals.size());
  std::exception_ptr failure;
  std::size_t failed_at = 0;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(signals.size()); ++i) {
    try {
      out[static_cast<std::size_t>(i)] = extract_features(signals[static_cast<std::size_t>(i)], cfg, kind);
    } catch (...) {
#pragma omp critical(hbid_extract_failure)
      {
        if (!failure || static_cast<std::size_t>(i) < failed_at) {
          failure = std::current_exception();
          failed_at = static_cast<std::size_t>(i);
        }
      }
    }
  }
  if (!failure) return out;
  if (ids == nullptr) std::rethrow_exception(failure);
  try {
    std::rethrow_exception(failure);
  } catch (const Error& e) {
    throw with_sample(e, (*ids)[failed_at]);
  }
}

}  // namespace

std::vector<FeatureVector> extract_batch(const std::vector<ComplexSeries>& signals,
                                         const ExtractionConfig& cfg, FeatureKind kind) {
  return extract_parallel(signals, cfg, kind, nullptr);
}

std::vector<FeatureVector> extract_batch_serial(const std::vector<ComplexSeries>& signals,
                                                const ExtractionConfig& cfg, FeatureKind kind) {
  std::vector<FeatureVector> out;
  out.reserve(signals.size());
  for (const auto& s : signals) out.push_back(extract_features(s, cfg, kind));
  return out;
}

std::vector<FeatureRow> extract_rows(const std::vector<Measurement>& measurements,
                                     const ExtractionConfig& cfg, FeatureKind kind, double segment_len,
                                     const RangeWindow& window) {
  std::vector<FeatureRow> rows;
  std::vector<ComplexSeries> signals;
  for (const auto& m : measurements) {
    // Cubes are reduced to s(t) before splitting so each segment shares one echo selection.
    Measurement base = m;
    if (std::holds_alternative<DataCube>(m.signal)) {
      try {
        base.signal = measurement_signal(m, window);
      } catch (const Error& e) {
        throw with_sample(e, sample_id(m));
      }
    }
    std::vector<Measurement> parts;
    if (segment_len > 0.0) parts = segment(base, segment_len);
    else parts.push_back(std::move(base));
    for (auto& p : parts) {
      FeatureRow row;
      row.sample_id = sample_id(p);
      row.label = p.label;
      row.session_id = p.session.str();
      row.segment_index = p.segment_index;
      rows.push_back(std::move(row));
      signals.push_back(std::get<ComplexSeries>(p.signal));
    }
  }
  std::vector<std::string> ids;
  for (const auto& r : rows) ids.push_back(r.sample_id);
  auto features = extract_parallel(signals, cfg, kind, &ids);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].features = std::move(features[i]);
  return rows;
}

LabeledDataset to_dataset(const std::vector<FeatureRow>& rows) {
  LabeledDataset data;
  for (const auto& r : rows) {
    if (!data.labels.empty() && r.features.values.size() != data.features.cols) {
      throw Error(ErrorCode::DimensionMismatch, "row " + r.sample_id + " has a different feature width");
    }
    data.features.append_row(r.features.values);
    data.labels.push_back(r.label);
    data.sessions.push_back(r.session_id);
  }
  return data;
}

}  // namespace hbid
