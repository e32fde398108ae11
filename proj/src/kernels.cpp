#include "hqcgan/kernels.hpp"

#include <cstring>

namespace hqcgan::kernels {

// gemm_nn uses the i-k-j order: for each output row i the k-th row of B is
// scaled by a[i,k] and added in ascending k, so each c[i,j] accumulates in a
// fixed order and the inner loop stays contiguous.
void gemm_nn_serial(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = a[i * k + kk];
      const double* bk = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
}

void gemm_nn_omp(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    std::memset(ci, 0, n * sizeof(double));
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = a[i * k + kk];
      const double* bk = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
}

void gemm_nn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t k, std::size_t n) {
#ifdef _OPENMP
  gemm_nn_omp(a, b, c, m, k, n);
#else
  gemm_nn_serial(a, b, c, m, k, n);
#endif
}

// gemm_nt is a dot product of contiguous rows per output element.
void gemm_nt_serial(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
      ci[j] = acc;
    }
  }
}

void gemm_nt_omp(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
      ci[j] = acc;
    }
  }
}

void gemm_nt(const double* a, const double* b, double* c,
             std::size_t m, std::size_t k, std::size_t n) {
#ifdef _OPENMP
  gemm_nt_omp(a, b, c, m, k, n);
#else
  gemm_nt_serial(a, b, c, m, k, n);
#endif
}

// gemm_tn: C[i,j] = sum_r A[r,i] * B[r,j], ascending r; each thread owns the
// full output row i so the accumulation order is schedule-independent.
void gemm_tn_serial(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    std::memset(ci, 0, n * sizeof(double));
    for (std::size_t r = 0; r < k; ++r) {
      const double ari = a[r * m + i];
      const double* br = b + r * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ari * br[j];
    }
  }
}

void gemm_tn_omp(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    std::memset(ci, 0, n * sizeof(double));
    for (std::size_t r = 0; r < k; ++r) {
      const double ari = a[r * m + i];
      const double* br = b + r * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ari * br[j];
    }
  }
}

void gemm_tn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t k, std::size_t n) {
#ifdef _OPENMP
  gemm_tn_omp(a, b, c, m, k, n);
#else
  gemm_tn_serial(a, b, c, m, k, n);
#endif
}

namespace {

// out[i,j] = sum_op sum_{a,b} K[bi,a] * rho[i_a, j_b] * conj(K[bj, b]) where
// i_a / j_b are i / j with the qubit bit forced to a / b. Ops accumulate in
// ascending order; each call writes one full output row.
inline void kraus_row(const cplx* rho, cplx* out_row, std::size_t dim,
                      std::size_t i, std::size_t mask,
                      const std::vector<kraus_op>& ops) {
  const std::size_t i0 = i & ~mask;
  const std::size_t i1 = i | mask;
  const int bi = (i & mask) ? 1 : 0;
  for (std::size_t j = 0; j < dim; ++j) {
    const std::size_t j0 = j & ~mask;
    const std::size_t j1 = j | mask;
    const int bj = (j & mask) ? 1 : 0;
    cplx acc{0.0, 0.0};
    for (const kraus_op& k : ops) {
      const cplx ki0 = k[bi * 2 + 0];
      const cplx ki1 = k[bi * 2 + 1];
      const cplx kj0 = std::conj(k[bj * 2 + 0]);
      const cplx kj1 = std::conj(k[bj * 2 + 1]);
      acc += ki0 * (rho[i0 * dim + j0] * kj0 + rho[i0 * dim + j1] * kj1) +
             ki1 * (rho[i1 * dim + j0] * kj0 + rho[i1 * dim + j1] * kj1);
    }
    out_row[j] = acc;
  }
}

}  // namespace

void kraus_apply_serial(const cplx* rho, cplx* out, std::size_t dim, int qubit,
                        const std::vector<kraus_op>& ops) {
  const std::size_t mask = std::size_t{1} << qubit;
  for (std::size_t i = 0; i < dim; ++i) kraus_row(rho, out + i * dim, dim, i, mask, ops);
}

void kraus_apply_omp(const cplx* rho, cplx* out, std::size_t dim, int qubit,
                     const std::vector<kraus_op>& ops) {
  const std::size_t mask = std::size_t{1} << qubit;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < dim; ++i) kraus_row(rho, out + i * dim, dim, i, mask, ops);
}

void kraus_apply(const cplx* rho, cplx* out, std::size_t dim, int qubit,
                 const std::vector<kraus_op>& ops) {
#ifdef _OPENMP
  kraus_apply_omp(rho, out, dim, qubit, ops);
#else
  kraus_apply_serial(rho, out, dim, qubit, ops);
#endif
}

namespace {

inline double poly3_row(const double* xi, const double* y, std::size_t n,
                        std::size_t dim, std::size_t skip_index) {
  const double inv_dim = 1.0 / static_cast<double>(dim);
  double row = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == skip_index) continue;
    const double* yj = y + j * dim;
    double dot = 0.0;
    for (std::size_t d = 0; d < dim; ++d) dot += xi[d] * yj[d];
    const double base = dot * inv_dim + 1.0;
    row += base * base * base;
  }
  return row;
}

constexpr std::size_t kNoSkip = ~std::size_t{0};

}  // namespace

double poly3_gram_sum_serial(const double* x, std::size_t m, const double* y,
                             std::size_t n, std::size_t dim, bool skip_diagonal) {
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    total += poly3_row(x + i * dim, y, n, dim, skip_diagonal ? i : kNoSkip);
  }
  return total;
}

double poly3_gram_sum_omp(const double* x, std::size_t m, const double* y,
                          std::size_t n, std::size_t dim, bool skip_diagonal) {
  std::vector<double> partial(m, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    partial[i] = poly3_row(x + i * dim, y, n, dim, skip_diagonal ? i : kNoSkip);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += partial[i];
  return total;
}

double poly3_gram_sum(const double* x, std::size_t m, const double* y,
                      std::size_t n, std::size_t dim, bool skip_diagonal) {
#ifdef _OPENMP
  return poly3_gram_sum_omp(x, m, y, n, dim, skip_diagonal);
#else
  return poly3_gram_sum_serial(x, m, y, n, dim, skip_diagonal);
#endif
}

}  // namespace hqcgan::kernels
