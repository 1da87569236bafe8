#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hbid/embedding.hpp"
#include "hbid/error.hpp"

namespace hbid {
namespace tsne {
namespace {

// Student-t numerators of row i and their sum. Shared by both gradient drivers.
double kernel_row(const Matrix& y, std::size_t i, double* num) {
  double sum = 0.0;
  for (std::size_t j = 0; j < y.rows; ++j) {
    if (j == i) {
      num[j] = 0.0;
      continue;
    }
    const double dx = y(i, 0) - y(j, 0);
    const double dy = y(i, 1) - y(j, 1);
    num[j] = 1.0 / (1.0 + dx * dx + dy * dy);
    sum += num[j];
  }
  return sum;
}

void gradient_row(const Matrix& p, const Matrix& y, const Matrix& num, double z, double exaggeration,
                  std::size_t i, Matrix& grad) {
  double gx = 0.0, gy = 0.0;
  for (std::size_t j = 0; j < y.rows; ++j) {
    if (j == i) continue;
    const double w = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
    gx += w * (y(i, 0) - y(j, 0));
    gy += w * (y(i, 1) - y(j, 1));
  }
  grad(i, 0) = 4.0 * gx;
  grad(i, 1) = 4.0 * gy;
}

double sum_rows(const std::vector<double>& row_sums) {
  double z = 0.0;
  for (double v : row_sums) z += v;
  return z;
}

}  // namespace

Matrix squared_distances(const Matrix& x) {
  Matrix d(x.rows, x.rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.rows); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < x.rows; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols; ++k) {
        const double diff = x(i, k) - x(j, k);
        s += diff * diff;
      }
      d(i, j) = s;
    }
  }
  return d;
}

Affinities affinities(const Matrix& x, double perplexity, double tol) {
  const std::size_t n = x.rows;
  if (!(perplexity > 0.0) || static_cast<double>(n) <= 3.0 * perplexity) {
    throw Error(ErrorCode::PerplexityTooLarge, "perplexity " + std::to_string(perplexity) +
                                                   " needs more than " + std::to_string(3.0 * perplexity) +
                                                   " rows, got " + std::to_string(n));
  }
  const Matrix d = squared_distances(x);
  const double target = std::log2(perplexity);
  Affinities a;
  a.conditional = Matrix(n, n);
  a.beta.assign(n, 1.0);
  a.entropy_bits.assign(n, 0.0);

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, d(i, j));
    }
    auto row = a.conditional.row(i);
    // Entropy in bits of the row at precision beta; distances are shifted by dmin for range.
    auto evaluate = [&](double beta) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = d(i, j) - dmin;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      for (double& v : row) v /= sum;
      // H = log Z + beta <D>, converted from nats.
      return (std::log(sum) + beta * weighted / sum) / std::log(2.0);
    };
    double beta = 1.0;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double h = evaluate(beta);
    for (int it = 0; it < 200 && std::abs(h - target) > tol; ++it) {
      if (h > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
      h = evaluate(beta);
    }
    a.beta[i] = beta;
    a.entropy_bits[i] = h;
  }

  a.joint = Matrix(n, n);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a.joint(i, j) = (a.conditional(i, j) + a.conditional(j, i)) / denom;
    }
  }
  return a;
}

double kl_divergence(const Matrix& joint, const Matrix& y) {
  const std::size_t n = y.rows;
  Matrix num(n, n);
  std::vector<double> row_sums(n);
  for (std::size_t i = 0; i < n; ++i) row_sums[i] = kernel_row(y, i, &num.data[i * n]);
  const double z = sum_rows(row_sums);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = joint(i, j);
      if (i == j || p <= 0.0) continue;
      const double q = std::max(num(i, j) / z, 1e-300);
      kl += p * std::log(p / q);
    }
  }
  return kl;
}

Matrix gradient(const Matrix& joint, const Matrix& y, double exaggeration) {
  const std::size_t n = y.rows;
  Matrix num(n, n);
  std::vector<double> row_sums(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto r = static_cast<std::size_t>(i);
    row_sums[r] = kernel_row(y, r, &num.data[r * n]);
  }
  const double z = sum_rows(row_sums);
  Matrix grad(n, 2);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    gradient_row(joint, y, num, z, exaggeration, static_cast<std::size_t>(i), grad);
  }
  return grad;
}

Matrix gradient_serial(const Matrix& joint, const Matrix& y, double exaggeration) {
  const std::size_t n = y.rows;
  Matrix num(n, n);
  std::vector<double> row_sums(n);
  for (std::size_t i = 0; i < n; ++i) row_sums[i] = kernel_row(y, i, &num.data[i * n]);
  const double z = sum_rows(row_sums);
  Matrix grad(n, 2);
  for (std::size_t i = 0; i < n; ++i) gradient_row(joint, y, num, z, exaggeration, i, grad);
  return grad;
}

Matrix initial_layout(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1e-4);
  Matrix y(n, 2);
  for (double& v : y.data) v = gauss(rng);
  return y;
}

}  // namespace tsne

Projection2D tsne2(const Matrix& x, const TsneOptions& opts, const std::vector<int>& labels) {
  if (opts.iterations < 1) throw Error(ErrorCode::InvalidArgument, "t-SNE needs at least one iteration");
  const auto aff = tsne::affinities(x, opts.perplexity);
  const std::size_t n = x.rows;
  const double eta = opts.learning_rate > 0.0 ? opts.learning_rate : static_cast<double>(n) / 12.0;

  Matrix y = tsne::initial_layout(n, opts.seed);
  Matrix update(n, 2);
  Matrix gains(n, 2, 1.0);
  for (int it = 0; it < opts.iterations; ++it) {
    const bool early = it < opts.exaggeration_iterations;
    const double momentum = early ? 0.5 : 0.8;
    const Matrix grad = tsne::gradient(aff.joint, y, early ? opts.early_exaggeration : 1.0);
    for (std::size_t k = 0; k < y.data.size(); ++k) {
      const bool same_sign = (grad.data[k] > 0.0) == (update.data[k] > 0.0);
      gains.data[k] = same_sign ? gains.data[k] * 0.8 : gains.data[k] + 0.2;
      gains.data[k] = std::max(gains.data[k], 0.01);
      update.data[k] = momentum * update.data[k] - eta * gains.data[k] * grad.data[k];
      y.data[k] += update.data[k];
    }
    for (int c = 0; c < 2; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, static_cast<std::size_t>(c));
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, static_cast<std::size_t>(c)) -= mean;
    }
  }

  Projection2D out;
  out.method = ProjectionMethod::tsne;
  out.points = std::move(y);
  out.labels = labels;
  out.perplexity = opts.perplexity;
  out.iterations = opts.iterations;
  out.seed = opts.seed;
  out.kl_divergence = tsne::kl_divergence(aff.joint, out.points);
  return out;
}

}  // namespace hbid
