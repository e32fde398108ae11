#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

// Data-parallel compute kernels. Each kernel comes as a serial reference and
// an OpenMP variant that is bit-identical to it: threads only ever own whole
// output rows, and every accumulation runs in a fixed ascending order, so the
// floating-point evaluation order does not depend on the schedule. The
// unsuffixed dispatchers pick the OpenMP variant when compiled with OpenMP
// and fall back to the serial reference otherwise.
namespace hqcgan::kernels {

using cplx = std::complex<double>;
// 2x2 operator, row-major: {k00, k01, k10, k11}.
using kraus_op = std::array<cplx, 4>;

// C (m x n) = A (m x k) * B (k x n); all row-major, C overwritten.
void gemm_nn_serial(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n);
void gemm_nn_omp(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n);
void gemm_nn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t k, std::size_t n);

// C (m x n) = A (m x k) * B (n x k)^T.
void gemm_nt_serial(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n);
void gemm_nt_omp(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n);
void gemm_nt(const double* a, const double* b, double* c,
             std::size_t m, std::size_t k, std::size_t n);

// C (m x n) = A (k x m)^T * B (k x n).
void gemm_tn_serial(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n);
void gemm_tn_omp(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n);
void gemm_tn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t k, std::size_t n);

// out = sum_i K_i rho K_i^dagger for 2x2 operators K_i acting on bit `qubit`
// of the row/column index. rho and out are dim x dim row-major and must be
// distinct buffers; dim is a power of two and qubit < log2(dim).
void kraus_apply_serial(const cplx* rho, cplx* out, std::size_t dim, int qubit,
                        const std::vector<kraus_op>& ops);
void kraus_apply_omp(const cplx* rho, cplx* out, std::size_t dim, int qubit,
                     const std::vector<kraus_op>& ops);
void kraus_apply(const cplx* rho, cplx* out, std::size_t dim, int qubit,
                 const std::vector<kraus_op>& ops);

// Sum over pairs (i, j) of ((x_i . y_j) / dim + 1)^3 where x_i, y_j are rows
// of X (m x dim) and Y (n x dim). skip_diagonal omits i == j terms (used when
// X and Y are the same sample set). Row subtotals are accumulated first and
// then summed in ascending row order in both variants.
double poly3_gram_sum_serial(const double* x, std::size_t m, const double* y,
                             std::size_t n, std::size_t dim, bool skip_diagonal);
double poly3_gram_sum_omp(const double* x, std::size_t m, const double* y,
                          std::size_t n, std::size_t dim, bool skip_diagonal);
double poly3_gram_sum(const double* x, std::size_t m, const double* y,
                      std::size_t n, std::size_t dim, bool skip_diagonal);

}  // namespace hqcgan::kernels
