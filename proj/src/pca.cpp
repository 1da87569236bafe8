#include <Eigen/Dense>

#include <cmath>

#include "hbid/embedding.hpp"
#include "hbid/error.hpp"

namespace hbid {

std::string_view to_string(ProjectionMethod m) noexcept {
  return m == ProjectionMethod::pca ? "pca" : "tsne";
}

Projection2D pca2(const Matrix& x, const std::vector<int>& labels) {
  if (x.rows < 3 || x.cols < 2) {
    throw Error(ErrorCode::DegenerateInput, "pca2 needs at least 3 rows and 2 columns");
  }
  const auto n = static_cast<Eigen::Index>(x.rows);
  const auto d = static_cast<Eigen::Index>(x.cols);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(x.data.data(), n, d);
  const Eigen::RowVectorXd mean = m.colwise().mean();
  const Eigen::MatrixXd centred = m.rowwise() - mean;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::DegenerateInput, "eigendecomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  Eigen::MatrixXd axes(d, 2);
  axes.col(0) = eig.eigenvectors().col(d - 1);
  axes.col(1) = eig.eigenvectors().col(d - 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index arg = 0;
    axes.col(c).cwiseAbs().maxCoeff(&arg);
    if (axes(arg, c) < 0.0) axes.col(c) *= -1.0;
  }

  const Eigen::MatrixXd proj = centred * axes;
  Projection2D out;
  out.method = ProjectionMethod::pca;
  out.labels = labels;
  out.points = Matrix(x.rows, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.points(static_cast<std::size_t>(i), 0) = proj(i, 0);
    out.points(static_cast<std::size_t>(i), 1) = proj(i, 1);
  }
  const double total = values.cwiseMax(0.0).sum();
  out.explained_variance_ratio = {total > 0 ? std::max(values(d - 1), 0.0) / total : 0.0,
                                  total > 0 ? std::max(values(d - 2), 0.0) / total : 0.0};
  return out;
}

}  // namespace hbid
