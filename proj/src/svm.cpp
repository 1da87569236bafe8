#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "hbid/classify.hpp"
#include "hbid/error.hpp"

namespace hbid {

void LabeledDataset::validate() const {
  if (features.rows != labels.size() || sessions.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "features, labels and sessions differ in row count");
  }
  std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2) throw Error(ErrorCode::SingleClass, "dataset needs at least two classes");
  for (int c : classes) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) seen.insert(sessions[i]);
    }
    if (seen.size() < 2) {
      throw Error(ErrorCode::TooFewSessions, "class " + std::to_string(c) + " appears in fewer than two sessions");
    }
  }
}

std::vector<double> Standardizer::transform_row(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw Error(ErrorCode::DimMismatch, "expected " + std::to_string(mean.size()) + " features, got " +
                                            std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = stddev[j] > 0.0 ? (x[j] - mean[j]) / stddev[j] : 0.0;
  }
  return out;
}

Matrix Standardizer::transform(const Matrix& x) const {
  if (x.cols != mean.size()) {
    throw Error(ErrorCode::DimMismatch, "expected " + std::to_string(mean.size()) + " features, got " +
                                            std::to_string(x.cols));
  }
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto r = transform_row(x.row(i));
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

Standardized standardize_fit_transform(const Matrix& train) {
  if (train.rows < 2) throw Error(ErrorCode::TooFewRows, "standardizer needs at least two rows");
  Standardizer s;
  s.mean.assign(train.cols, 0.0);
  s.stddev.assign(train.cols, 0.0);
  const auto n = static_cast<double>(train.rows);
  for (std::size_t j = 0; j < train.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < train.rows; ++i) sum += train(i, j);
    const double mu = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < train.rows; ++i) {
      const double d = train(i, j) - mu;
      ss += d * d;
    }
    s.mean[j] = mu;
    const double sd = std::sqrt(ss / n);
    // Relative threshold: a column whose spread is pure rounding noise counts as constant.
    s.stddev[j] = sd > 1e-12 * std::max(1.0, std::abs(mu)) ? sd : 0.0;
  }
  Standardized out{s, s.transform(train)};
  return out;
}

SmoResult smo_solve(const Matrix& gram, std::span<const int> y, const SmoOptions& opts) {
  const std::size_t n = y.size();
  if (gram.rows != n || gram.cols != n) throw Error(ErrorCode::DimMismatch, "Gram matrix size mismatch");
  if (!(opts.C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw Error(ErrorCode::InvalidArgument, "binary labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw Error(ErrorCode::SingleClass, "binary problem has a single class");

  const double C = opts.C;
  const long max_iter = opts.max_iterations > 0
                            ? opts.max_iterations
                            : std::max<long>(100 * static_cast<long>(n), 100000);
  constexpr double kTau = 1e-12;

  auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * gram(i, j); };
  auto in_up = [&](std::size_t t, const std::vector<double>& a) {
    return (y[t] == 1 && a[t] < C) || (y[t] == -1 && a[t] > 0.0);
  };
  auto in_low = [&](std::size_t t, const std::vector<double>& a) {
    return (y[t] == 1 && a[t] > 0.0) || (y[t] == -1 && a[t] < C);
  };

  SmoResult res;
  auto& alpha = res.alpha;
  alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q alpha - e

  long iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t, alpha) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
      if (in_low(t, alpha) && y[t] * grad[t] > gmax2) {
        gmax2 = y[t] * grad[t];
        j = t;
      }
    }
    gap = gmax + gmax2;
    if (i == n || j == n || gap < opts.tol) break;
    if (iter >= max_iter) {
      throw Error(ErrorCode::NoConvergence, "SMO stopped after " + std::to_string(iter) +
                                                " iterations with KKT gap " + std::to_string(gap));
    }
    ++iter;

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    // Gram is symmetric; read rows i and j contiguously.
    const double* ki = &gram.data[i * n];
    const double* kj = &gram.data[j * n];
    const double ci = y[i] * dai;
    const double cj = y[j] * daj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki[t] * ci + kj[t] * cj);
  }

  // rho: mean of y G over free variables, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  long n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  res.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  res.iterations = iter;
  res.kkt_gap = gap;
  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] - 1.0);
  res.dual_objective = -0.5 * obj;
  return res;
}

double BinaryMachine::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t i = 0; i < coef.size(); ++i) f += coef[i] * kernel(support_vectors.row(i), x);
  return f;
}

namespace {

constexpr double kSupportThreshold = 1e-8;

BinaryMachine machine_from(const SmoResult& res, const Matrix& x, std::span<const int> y,
                           const Kernel& kernel, double C) {
  BinaryMachine m;
  m.kernel = kernel;
  m.C = C;
  m.bias = -res.rho;
  m.iterations = res.iterations;
  m.dual_objective = res.dual_objective;
  m.support_vectors.cols = x.cols;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (res.alpha[i] > kSupportThreshold) {
      m.support_vectors.append_row(x.row(i));
      m.coef.push_back(res.alpha[i] * y[i]);
      m.support_indices.push_back(i);
    }
  }
  return m;
}

}  // namespace

BinaryMachine train_binary_svm(const Matrix& x, std::span<const int> y, const Kernel& kernel,
                               const SmoOptions& opts) {
  if (x.rows != y.size()) throw Error(ErrorCode::LengthMismatch, "features and labels differ in length");
  const Matrix gram = gram_matrix(x, kernel);
  return machine_from(smo_solve(gram, y, opts), x, y, kernel, opts.C);
}

SvmModel train_multiclass(const LabeledDataset& data, const TrainOptions& opts) {
  if (data.features.rows != data.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "features and labels differ in length");
  }
  SvmModel model;
  model.C = opts.C;
  model.standardize = opts.standardize;
  const std::set<int> uniq(data.labels.begin(), data.labels.end());
  model.classes.assign(uniq.begin(), uniq.end());
  if (model.classes.size() < 2) throw Error(ErrorCode::SingleClass, "need at least two classes");

  Matrix x;
  if (opts.standardize) {
    auto st = standardize_fit_transform(data.features);
    model.standardizer = std::move(st.standardizer);
    x = std::move(st.data);
  } else {
    model.standardizer.mean.assign(data.features.cols, 0.0);
    model.standardizer.stddev.assign(data.features.cols, 1.0);
    x = data.features;
  }

  model.kernel.type = opts.kernel;
  if (opts.kernel == KernelType::rbf) {
    if (opts.gamma > 0.0) {
      model.kernel.gamma = opts.gamma;
    } else {
      const double count = static_cast<double>(x.data.size());
      double sum = 0.0, sq = 0.0;
      for (double v : x.data) sum += v;
      const double mu = sum / count;
      for (double v : x.data) sq += (v - mu) * (v - mu);
      const double var = sq / count;
      const double d = static_cast<double>(x.cols);
      model.kernel.gamma = var > 0.0 ? 1.0 / (d * var) : 1.0 / d;
    }
  }

  const Matrix gram = gram_matrix(x, model.kernel);
  SmoOptions smo{opts.C, opts.tol, 0};
  const std::size_t n_machines = model.classes.size() == 2 ? 1 : model.classes.size();
  model.machines.resize(n_machines);
  const std::size_t offset = model.classes.size() == 2 ? 1 : 0;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_machines); ++c) {
    const int target = model.classes[static_cast<std::size_t>(c) + offset];
    std::vector<int> y(data.labels.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.labels[i] == target ? 1 : -1;
    model.machines[static_cast<std::size_t>(c)] = machine_from(smo_solve(gram, y, smo), x, y, model.kernel, opts.C);
  }
  return model;
}

Prediction predict(const SvmModel& model, const Matrix& x) {
  if (x.cols != model.dims()) {
    throw Error(ErrorCode::DimMismatch, "model expects " + std::to_string(model.dims()) +
                                            " features, got " + std::to_string(x.cols));
  }
  const Matrix z = model.standardize ? model.standardizer.transform(x) : x;
  const std::size_t n_classes = model.classes.size();
  Prediction out;
  out.scores = Matrix(x.rows, n_classes);
  out.labels.resize(x.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.rows); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (n_classes == 2) {
      const double f = model.machines[0].decision(z.row(i));
      out.scores(i, 0) = -f;
      out.scores(i, 1) = f;
    } else {
      for (std::size_t c = 0; c < n_classes; ++c) out.scores(i, c) = model.machines[c].decision(z.row(i));
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < n_classes; ++c) {
      if (out.scores(i, c) > out.scores(i, best)) best = c;
    }
    out.labels[i] = model.classes[best];
  }
  return out;
}

}  // namespace hbid
