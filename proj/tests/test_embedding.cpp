#include <doctest.h>

#include <cmath>
#include <random>

#include "hbid/embedding.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hbid;

namespace {

Matrix gaussian(std::size_t n, std::size_t d, std::uint64_t seed, std::vector<double> scales = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = g(rng) * (j < scales.size() ? scales[j] : 1.0);
  }
  return m;
}

Matrix clusters(std::size_t per, std::size_t d, double sep, std::uint64_t seed, std::vector<int>& labels) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m;
  labels.clear();
  for (int c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < per; ++k) {
      std::vector<double> row(d);
      for (std::size_t j = 0; j < d; ++j) row[j] = g(rng) + (j == static_cast<std::size_t>(c) ? sep : 0.0);
      m.append_row(row);
      labels.push_back(c);
    }
  }
  return m;
}

double column_variance(const Matrix& m, std::size_t c) {
  double mean = 0, v = 0;
  for (std::size_t i = 0; i < m.rows; ++i) mean += m(i, c);
  mean /= static_cast<double>(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) v += (m(i, c) - mean) * (m(i, c) - mean);
  return v / static_cast<double>(m.rows - 1);
}

}  // namespace

TEST_CASE("PCA of points on a line") {
  std::vector<double> dir(10);
  for (std::size_t j = 0; j < 10; ++j) dir[j] = 1.0 + static_cast<double>(j);
  Matrix x;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> row(10);
    for (std::size_t j = 0; j < 10; ++j) row[j] = 0.3 * i * dir[j] + 5.0;
    x.append_row(row);
  }
  const auto p = pca2(x);
  CHECK(p.explained_variance_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.explained_variance_ratio[1]) <= 1e-12);
  for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(p.points(i, 1)) <= 1e-9);
}

TEST_CASE("PCA against a Jacobi eigensolver") {
  const auto x = gaussian(60, 6, 3, {3.0, 2.0, 1.5, 1.0, 0.5, 0.2});
  const auto p = pca2(x);
  Matrix vecs;
  const auto cov = oracle::covariance(x);
  const auto ev = oracle::jacobi_eigenvalues(cov, &vecs);
  const double scale = 60.0 / 59.0;
  CHECK(std::abs(column_variance(p.points, 0) - ev[0] * scale) <= 1e-9 * ev[0]);
  CHECK(std::abs(column_variance(p.points, 1) - ev[1] * scale) <= 1e-9 * ev[0]);
  double total = 0;
  for (double v : ev) total += v;
  CHECK(std::abs(p.explained_variance_ratio[0] - ev[0] / total) <= 1e-9);

  std::vector<double> mean(6, 0.0);
  for (std::size_t i = 0; i < 60; ++i) {
    for (std::size_t j = 0; j < 6; ++j) mean[j] += x(i, j) / 60.0;
  }
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> got, want;
    for (std::size_t i = 0; i < 60; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 6; ++j) s += (x(i, j) - mean[j]) * vecs(j, c);
      want.push_back(s);
      got.push_back(p.points(i, c));
    }
    const double sign = got[0] * want[0] >= 0 ? 1.0 : -1.0;
    for (double& w : want) w *= sign;
    CHECK(oracle::relative_error(got, want) <= 1e-9);
  }
}

TEST_CASE("PCA invariances") {
  const auto x = gaussian(40, 3, 4, {4.0, 2.0, 1.0});
  const auto p = pca2(x);

  auto shifted = x;
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 3; ++j) shifted(i, j) += 100.0 * (j + 1);
  }
  const auto ps = pca2(shifted);
  for (std::size_t i = 0; i < p.points.data.size(); ++i) CHECK(ps.points.data[i] == doctest::Approx(p.points.data[i]).epsilon(1e-9));

  // Rotation in the plane of the first two coordinates leaves variances unchanged.
  const double a = 0.7;
  auto rotated = x;
  for (std::size_t i = 0; i < 40; ++i) {
    rotated(i, 0) = std::cos(a) * x(i, 0) - std::sin(a) * x(i, 1);
    rotated(i, 1) = std::sin(a) * x(i, 0) + std::cos(a) * x(i, 1);
  }
  const auto pr = pca2(rotated);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(column_variance(pr.points, c) == doctest::Approx(column_variance(p.points, c)).epsilon(1e-9));
  }
  CHECK_CODE(pca2(gaussian(2, 3, 1)), ErrorCode::DegenerateInput);
  CHECK_CODE(pca2(gaussian(5, 1, 1)), ErrorCode::DegenerateInput);
}

TEST_CASE("t-SNE affinities") {
  std::vector<int> labels;
  const auto x = clusters(20, 5, 6.0, 5, labels);
  const auto a = tsne::affinities(x, 10.0);
  const std::size_t n = x.rows;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(a.entropy_bits[i] - std::log2(10.0)) <= 1e-4);
    double row = 0, h = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = a.conditional(i, j);
      row += p;
      if (p > 0) h -= p * std::log2(p);
      CHECK(a.joint(i, j) == doctest::Approx(a.joint(j, i)).epsilon(1e-15));
      total += a.joint(i, j);
    }
    CHECK(a.conditional(i, i) == 0.0);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(h - std::log2(10.0)) <= 1e-4);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_CODE(tsne::affinities(x, 20.0), ErrorCode::PerplexityTooLarge);
}

TEST_CASE("t-SNE gradient matches finite differences") {
  std::vector<int> labels;
  const auto x = clusters(6, 4, 3.0, 6, labels);
  const auto a = tsne::affinities(x, 4.0);
  const auto y = gaussian(x.rows, 2, 7);
  const auto g = tsne::gradient(a.joint, y, 1.0);
  const double h = 1e-6;
  for (std::size_t i = 0; i < y.rows; i += 5) {
    for (std::size_t k = 0; k < 2; ++k) {
      auto yp = y, ym = y;
      yp(i, k) += h;
      ym(i, k) -= h;
      const double fd = (tsne::kl_divergence(a.joint, yp) - tsne::kl_divergence(a.joint, ym)) / (2 * h);
      CHECK(g(i, k) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  CHECK(g.data == tsne::gradient_serial(a.joint, y, 1.0).data);
}

TEST_CASE("t-SNE separates clusters") {
  std::vector<int> labels;
  const auto x = clusters(30, 8, 8.0, 8, labels);
  TsneOptions opts;
  opts.perplexity = 15.0;
  opts.iterations = 500;
  opts.seed = 3;
  const auto p = tsne2(x, opts, labels);
  CHECK(p.points.rows == 90);
  CHECK(p.points.cols == 2);
  CHECK(oracle::silhouette(p.points, labels) >= 0.5);

  const auto a = tsne::affinities(x, opts.perplexity);
  const double initial = tsne::kl_divergence(a.joint, tsne::initial_layout(90, opts.seed));
  CHECK(p.kl_divergence < initial);
  CHECK(p.kl_divergence == doctest::Approx(tsne::kl_divergence(a.joint, p.points)).epsilon(1e-9));

  const auto again = tsne2(x, opts, labels);
  CHECK(again.points.data == p.points.data);
  opts.iterations = 0;
  CHECK_CODE(tsne2(x, opts), ErrorCode::InvalidArgument);
}
