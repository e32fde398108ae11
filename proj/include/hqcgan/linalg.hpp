#pragma once

#include <cstddef>
#include <vector>

// Dense row-major matrix of doubles plus the handful of typed operations the
// network, metrics and dataset layers need. The heavy lifting is delegated to
// the raw kernels in kernels.hpp.
namespace hqcgan::linalg {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// a (m x k) * b (k x n); shapes validated, std::invalid_argument on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

// a (m x k) * b(n x k)^T -> m x n.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// a (k x m)^T * b (k x n) -> m x n.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

std::vector<double> col_sums(const Matrix& a);
std::vector<double> col_means(const Matrix& a);

bool all_finite(const Matrix& a);

}  // namespace hqcgan::linalg
