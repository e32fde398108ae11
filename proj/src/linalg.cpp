#include "hqcgan/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hqcgan/kernels.hpp"

namespace hqcgan::linalg {

namespace {

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                              std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                              " vs " + std::to_string(b.rows) + "x" +
                              std::to_string(b.cols) + ")");
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) shape_error("matmul", a, b);
  Matrix c(a.rows, b.cols);
  kernels::gemm_nn(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.cols);
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) shape_error("matmul_nt", a, b);
  Matrix c(a.rows, b.rows);
  kernels::gemm_nt(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.rows);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) shape_error("matmul_tn", a, b);
  Matrix c(a.cols, b.cols);
  kernels::gemm_tn(a.data.data(), b.data.data(), c.data.data(), a.cols, a.rows, b.cols);
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

std::vector<double> col_sums(const Matrix& a) {
  std::vector<double> s(a.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* r = a.row(i);
    for (std::size_t j = 0; j < a.cols; ++j) s[j] += r[j];
  }
  return s;
}

std::vector<double> col_means(const Matrix& a) {
  if (a.rows == 0) throw std::invalid_argument("col_means: empty matrix");
  std::vector<double> s = col_sums(a);
  for (double& v : s) v /= static_cast<double>(a.rows);
  return s;
}

bool all_finite(const Matrix& a) {
  for (double v : a.data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace hqcgan::linalg
