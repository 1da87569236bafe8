#pragma once

#include <string>
#include <vector>

#include "hbid/classify.hpp"
#include "hbid/mfcc.hpp"
#include "hbid/radar.hpp"
#include "hbid/synth.hpp"

namespace hbid {

/// One extracted sample with its bookkeeping columns.
struct FeatureRow {
  std::string sample_id;
  int label = 0;
  std::string session_id;
  int segment_index = 0;
  FeatureVector features;
};

/// s(t) of a measurement; cube measurements go through range FFT, beamforming and echo selection.
ComplexSeries measurement_signal(const Measurement& m, const RangeWindow& window = {});

std::string sample_id(const Measurement& m);

/// Per-sample extraction over a batch, samples in parallel. Output order follows input order.
std::vector<FeatureVector> extract_batch(const std::vector<ComplexSeries>& signals,
                                         const ExtractionConfig& cfg, FeatureKind kind);
/// Single-threaded reference.
std::vector<FeatureVector> extract_batch_serial(const std::vector<ComplexSeries>& signals,
                                                const ExtractionConfig& cfg, FeatureKind kind);

/// Extracts `kind` for every measurement (optionally split into `segment_len` pieces first).
std::vector<FeatureRow> extract_rows(const std::vector<Measurement>& measurements,
                                     const ExtractionConfig& cfg, FeatureKind kind,
                                     double segment_len = 0.0, const RangeWindow& window = {});

LabeledDataset to_dataset(const std::vector<FeatureRow>& rows);

}  // namespace hbid
