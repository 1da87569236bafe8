#include <cmath>

#include "hbid/classify.hpp"
#include "hbid/error.hpp"

namespace hbid {

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  if (type == KernelType::linear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

namespace {

// Upper triangle of row i, mirrored; rows touch disjoint entries.
void gram_row(const Matrix& x, const Kernel& k, std::size_t i, Matrix& out) {
  for (std::size_t j = i; j < x.rows; ++j) {
    const double v = k(x.row(i), x.row(j));
    out(i, j) = v;
    out(j, i) = v;
  }
}

}  // namespace

Matrix gram_matrix(const Matrix& x, const Kernel& k) {
  Matrix out(x.rows, x.rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.rows); ++i) {
    gram_row(x, k, static_cast<std::size_t>(i), out);
  }
  return out;
}

Matrix gram_matrix_serial(const Matrix& x, const Kernel& k) {
  Matrix out(x.rows, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) gram_row(x, k, i, out);
  return out;
}

Matrix cross_kernel(const Matrix& a, const Matrix& b, const Kernel& k) {
  if (a.cols != b.cols) throw Error(ErrorCode::DimMismatch, "kernel operands differ in width");
  Matrix out(a.rows, b.rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(a.rows); ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < b.rows; ++j) out(r, j) = k(a.row(r), b.row(j));
  }
  return out;
}

}  // namespace hbid
