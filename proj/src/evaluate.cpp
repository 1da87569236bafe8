#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "hbid/classify.hpp"
#include "hbid/error.hpp"

namespace hbid {

double roc_auc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    // Mid-rank of the tie block (1-based ranks i+1 .. j+1).
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (positive[order[k]]) {
        rank_sum += mid;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw Error(ErrorCode::SingleClass, "AUC needs both positive and negative samples");
  }
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

EvalReport metrics(std::span<const int> true_labels, std::span<const int> predicted, const Matrix& scores,
                   const std::vector<int>& classes) {
  if (true_labels.size() != predicted.size() || scores.rows != true_labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "labels, predictions and scores differ in length");
  }
  if (scores.cols != classes.size()) {
    throw Error(ErrorCode::DimMismatch, "score columns do not match the class list");
  }
  std::map<int, std::size_t> index;
  for (std::size_t c = 0; c < classes.size(); ++c) index[classes[c]] = c;
  auto idx = [&](int label) {
    auto it = index.find(label);
    if (it == index.end()) throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(label) + " not in class list");
    return it->second;
  };

  EvalReport r;
  r.classes = classes;
  const std::size_t k = classes.size();
  r.confusion.assign(k, std::vector<long>(k, 0));
  long correct = 0;
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    ++r.confusion[idx(true_labels[i])][idx(predicted[i])];
    if (true_labels[i] == predicted[i]) ++correct;
  }
  const auto total = static_cast<double>(true_labels.size());
  r.accuracy = total > 0 ? 100.0 * static_cast<double>(correct) / total : 0.0;

  r.per_class_accuracy.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const long row = std::accumulate(r.confusion[c].begin(), r.confusion[c].end(), 0L);
    r.per_class_accuracy[c] = row > 0 ? 100.0 * static_cast<double>(r.confusion[c][c]) / static_cast<double>(row) : 0.0;
  }

  r.per_class_auc.assign(k, 0.0);
  double auc_sum = 0.0;
  int auc_count = 0;
  std::vector<double> col(true_labels.size());
  std::vector<bool> pos(true_labels.size());
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
      col[i] = scores(i, c);
      pos[i] = true_labels[i] == classes[c];
      n_pos += pos[i] ? 1 : 0;
    }
    if (n_pos == 0 || n_pos == true_labels.size()) continue;
    r.per_class_auc[c] = roc_auc(col, pos);
    auc_sum += r.per_class_auc[c];
    ++auc_count;
  }
  r.macro_auc = auc_count > 0 ? auc_sum / auc_count : 0.0;
  r.true_labels.assign(true_labels.begin(), true_labels.end());
  r.predicted.assign(predicted.begin(), predicted.end());
  r.scores = scores;
  return r;
}

EvalReport session_grouped_cv(const LabeledDataset& data, const TrainOptions& opts) {
  if (data.features.rows != data.labels.size() || data.sessions.size() != data.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "features, labels and sessions differ in row count");
  }
  const std::set<std::string> session_set(data.sessions.begin(), data.sessions.end());
  if (session_set.size() < 2) {
    throw Error(ErrorCode::TooFewSessions, "grouped CV needs at least two sessions, got " +
                                               std::to_string(session_set.size()));
  }
  data.validate();
  const std::set<int> class_set(data.labels.begin(), data.labels.end());
  const std::vector<int> classes(class_set.begin(), class_set.end());

  const std::size_t n = data.size();
  std::vector<int> predicted(n, 0);
  std::vector<int> fold_of(n, -1);
  Matrix scores(n, classes.size());
  std::vector<FoldResult> folds;

  int fold_index = 0;
  for (const auto& session : session_set) {
    std::vector<std::size_t> train_idx, val_idx;
    for (std::size_t i = 0; i < n; ++i) {
      (data.sessions[i] == session ? val_idx : train_idx).push_back(i);
    }
    LabeledDataset train;
    train.features = take_rows(data.features, train_idx);
    for (std::size_t i : train_idx) {
      train.labels.push_back(data.labels[i]);
      train.sessions.push_back(data.sessions[i]);
    }
    const SvmModel model = train_multiclass(train, opts);
    if (model.classes != classes) {
      throw Error(ErrorCode::TooFewSessions, "fold " + session + " leaves a class without training data");
    }
    const Prediction pred = predict(model, take_rows(data.features, val_idx));

    FoldResult fr;
    fr.session = session;
    fr.n_train = train_idx.size();
    fr.n_val = val_idx.size();
    long correct = 0;
    for (std::size_t v = 0; v < val_idx.size(); ++v) {
      const std::size_t i = val_idx[v];
      predicted[i] = pred.labels[v];
      fold_of[i] = fold_index;
      for (std::size_t c = 0; c < classes.size(); ++c) scores(i, c) = pred.scores(v, c);
      if (pred.labels[v] == data.labels[i]) ++correct;
    }
    fr.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(val_idx.size());
    folds.push_back(fr);
    ++fold_index;
  }

  EvalReport report = metrics(data.labels, predicted, scores, classes);
  report.folds = std::move(folds);
  report.fold_of = std::move(fold_of);
  return report;
}

}  // namespace hbid
