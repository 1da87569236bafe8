#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hbid/matrix.hpp"

namespace hbid {

struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> sessions;

  std::size_t size() const noexcept { return labels.size(); }
  /// Row counts agree, >= 2 classes, every class present in >= 2 sessions.
  void validate() const;
};

/// Per-dimension z-scoring with training statistics; zero-variance dimensions map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  ///< 0 marks a dropped (constant) dimension

  std::vector<double> transform_row(std::span<const double> x) const;
  Matrix transform(const Matrix& x) const;
};

struct Standardized {
  Standardizer standardizer;
  Matrix data;
};

Standardized standardize_fit_transform(const Matrix& train);

enum class KernelType { linear, rbf };

struct Kernel {
  KernelType type = KernelType::rbf;
  double gamma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

/// Full Gram matrix, rows computed in parallel.
Matrix gram_matrix(const Matrix& x, const Kernel& k);
/// Single-threaded reference with identical per-entry arithmetic.
Matrix gram_matrix_serial(const Matrix& x, const Kernel& k);
/// K(a_i, b_j) for every pair, rows in parallel.
Matrix cross_kernel(const Matrix& a, const Matrix& b, const Kernel& k);

struct SmoOptions {
  double C = 10.0;
  double tol = 1e-3;
  long max_iterations = 0;  ///< 0: max(100 n, 100000)
};

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;  ///< decision f(x) = sum alpha_i y_i K(x_i, x) - rho
  long iterations = 0;
  double dual_objective = 0.0;  ///< sum alpha - 1/2 alpha' Q alpha
  double kkt_gap = 0.0;
};

/// Dual soft-margin QP by SMO with maximal-violating-pair selection.
SmoResult smo_solve(const Matrix& gram, std::span<const int> y, const SmoOptions& opts);

struct BinaryMachine {
  Matrix support_vectors;
  std::vector<double> coef;  ///< alpha_i y_i
  std::vector<std::size_t> support_indices;
  double bias = 0.0;         ///< f(x) = sum coef_i K(sv_i, x) + bias
  Kernel kernel;
  double C = 10.0;
  long iterations = 0;
  double dual_objective = 0.0;

  double decision(std::span<const double> x) const;
};

BinaryMachine train_binary_svm(const Matrix& x, std::span<const int> y, const Kernel& kernel,
                               const SmoOptions& opts);

struct TrainOptions {
  KernelType kernel = KernelType::rbf;
  double gamma = 0.0;  ///< 0: 1 / (d * Var(training features))
  double C = 10.0;
  double tol = 1e-3;
  bool standardize = true;
};

struct SvmModel {
  Standardizer standardizer;
  bool standardize = true;
  Kernel kernel;
  double C = 10.0;
  std::vector<int> classes;  ///< ascending
  /// One machine per class, or a single machine (classes[1] vs classes[0]) for two classes.
  std::vector<BinaryMachine> machines;

  std::size_t dims() const noexcept { return standardizer.mean.size(); }
};

SvmModel train_multiclass(const LabeledDataset& data, const TrainOptions& opts);

struct Prediction {
  std::vector<int> labels;
  Matrix scores;  ///< samples x classes, columns follow model.classes
};

Prediction predict(const SvmModel& model, const Matrix& x);

struct FoldResult {
  std::string session;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  double accuracy = 0.0;  ///< %
};

struct EvalReport {
  std::vector<int> classes;
  std::vector<FoldResult> folds;
  double accuracy = 0.0;  ///< %
  std::vector<std::vector<long>> confusion;  ///< true x predicted
  double macro_auc = 0.0;
  std::vector<double> per_class_auc;
  std::vector<double> per_class_accuracy;  ///< %
  /// Pooled predictions in dataset row order.
  std::vector<int> true_labels;
  std::vector<int> predicted;
  Matrix scores;
  std::vector<int> fold_of;
};

/// Mann-Whitney AUC with mid-rank tie correction.
double roc_auc(std::span<const double> scores, const std::vector<bool>& positive);

EvalReport metrics(std::span<const int> true_labels, std::span<const int> predicted,
                   const Matrix& scores, const std::vector<int>& classes);

/// One fold per distinct session: that session validates, the rest train.
EvalReport session_grouped_cv(const LabeledDataset& data, const TrainOptions& opts);

}  // namespace hbid
