#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hbid/matrix.hpp"

namespace hbid {

enum class ProjectionMethod { pca, tsne };

std::string_view to_string(ProjectionMethod m) noexcept;

struct Projection2D {
  Matrix points;  ///< n x 2
  std::vector<int> labels;
  ProjectionMethod method = ProjectionMethod::pca;
  double perplexity = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  /// pca: fraction of total variance on each axis. tsne: empty.
  std::vector<double> explained_variance_ratio;
  double kl_divergence = 0.0;  ///< tsne only
};

/// Projection onto the top two principal axes of the centred data. Axes are ordered by
/// decreasing variance and each axis is signed so its largest-magnitude loading is positive.
Projection2D pca2(const Matrix& x, const std::vector<int>& labels = {});

struct TsneOptions {
  double perplexity = 30.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double learning_rate = 0.0;  ///< 0: N / 12
  std::uint64_t seed = 0;
};

/// Exact O(N^2) t-SNE.
Projection2D tsne2(const Matrix& x, const TsneOptions& opts, const std::vector<int>& labels = {});

namespace tsne {

Matrix squared_distances(const Matrix& x);

struct Affinities {
  Matrix conditional;  ///< rows p_{j|i}, each summing to 1
  Matrix joint;        ///< (P + P') / 2N
  std::vector<double> beta;
  std::vector<double> entropy_bits;
};

/// Per-row Gaussian precision fitted by bisection so the row entropy equals log2(perplexity).
Affinities affinities(const Matrix& x, double perplexity, double tol = 1e-5);

/// KL(P || Q) for the Student-t low-dimensional kernel.
double kl_divergence(const Matrix& joint, const Matrix& y);

/// dC/dY with the joint affinities scaled by `exaggeration`. Rows in parallel.
Matrix gradient(const Matrix& joint, const Matrix& y, double exaggeration);
Matrix gradient_serial(const Matrix& joint, const Matrix& y, double exaggeration);

/// Initial layout: isotropic Gaussian with std 1e-4.
Matrix initial_layout(std::size_t n, std::uint64_t seed);

}  // namespace tsne
}  // namespace hbid
