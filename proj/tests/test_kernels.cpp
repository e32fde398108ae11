#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hqcgan/kernels.hpp"
#include "hqcgan/linalg.hpp"
#include "hqcgan/rng.hpp"
#include "oracles.hpp"

using namespace hqcgan;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  rng::Stream s(seed);
  std::vector<double> v(n);
  for (double& x : v) x = s.next_normal();
  return v;
}

// Plain j-i-k reference multiply; different association order on purpose.
std::vector<double> naive_nn(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t m, std::size_t k, std::size_t n) {
  std::vector<double> c(m * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += a[i * k + kk] * b[kk * n + j];
      c[i * n + j] = acc;
    }
  return c;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

bool bitwise_equal(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("gemm variants match a naive reference", "[kernels]") {
  const std::size_t m = 17, k = 23, n = 13;
  const auto a = random_vec(m * k, 11);
  const auto b_nn = random_vec(k * n, 22);

  SECTION("gemm_nn") {
    std::vector<double> c(m * n);
    kernels::gemm_nn_serial(a.data(), b_nn.data(), c.data(), m, k, n);
    REQUIRE(max_abs_diff(c, naive_nn(a, b_nn, m, k, n)) < 1e-12);
  }

  SECTION("gemm_nt equals gemm_nn against the transpose") {
    const auto b_t = random_vec(n * k, 33);  // n x k
    std::vector<double> bt(k * n);           // k x n transpose
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) bt[j * n + i] = b_t[i * k + j];
    std::vector<double> c(m * n);
    kernels::gemm_nt_serial(a.data(), b_t.data(), c.data(), m, k, n);
    REQUIRE(max_abs_diff(c, naive_nn(a, bt, m, k, n)) < 1e-12);
  }

  SECTION("gemm_tn equals the transposed-input product") {
    const auto at = random_vec(k * m, 44);  // k x m, interpreted as A^T input
    std::vector<double> a_full(m * k);      // m x k
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < m; ++j) a_full[j * k + i] = at[i * m + j];
    std::vector<double> c(m * n);
    kernels::gemm_tn_serial(at.data(), b_nn.data(), c.data(), m, k, n);
    REQUIRE(max_abs_diff(c, naive_nn(a_full, b_nn, m, k, n)) < 1e-12);
  }
}

TEST_CASE("OpenMP gemm variants are bit-identical to the serial reference", "[kernels]") {
  for (auto [m, k, n] : {std::array<std::size_t, 3>{64, 100, 256},
                         std::array<std::size_t, 3>{7, 1, 5},
                         std::array<std::size_t, 3>{33, 129, 65}}) {
    const auto a = random_vec(m * k, 100 + m);
    const auto b = random_vec(k * n, 200 + n);
    const auto bt = random_vec(n * k, 300 + k);
    const auto at = random_vec(k * m, 400 + m);

    std::vector<double> c1(m * n), c2(m * n);
    kernels::gemm_nn_serial(a.data(), b.data(), c1.data(), m, k, n);
    kernels::gemm_nn_omp(a.data(), b.data(), c2.data(), m, k, n);
    REQUIRE(bitwise_equal(c1, c2));

    kernels::gemm_nt_serial(a.data(), bt.data(), c1.data(), m, k, n);
    kernels::gemm_nt_omp(a.data(), bt.data(), c2.data(), m, k, n);
    REQUIRE(bitwise_equal(c1, c2));

    kernels::gemm_tn_serial(at.data(), b.data(), c1.data(), m, k, n);
    kernels::gemm_tn_omp(at.data(), b.data(), c2.data(), m, k, n);
    REQUIRE(bitwise_equal(c1, c2));
  }
}

TEST_CASE("kraus_apply matches the dense operator-lift oracle", "[kernels]") {
  const int n_qubits = 3;
  const std::size_t dim = 8;
  const auto rho = oracle::random_density(n_qubits, 71);
  const double h = 1.0 / std::sqrt(2.0);
  const std::vector<kernels::kraus_op> ops = {
      {kernels::cplx{h, 0}, kernels::cplx{h, 0}, kernels::cplx{h, 0},
       kernels::cplx{-h, 0.1}},  // deliberately non-unitary second op mix
      {kernels::cplx{0, 0}, kernels::cplx{0.3, -0.2}, kernels::cplx{0.1, 0},
       kernels::cplx{0, 0}},
  };
  for (int qubit = 0; qubit < n_qubits; ++qubit) {
    hqcgan::qsim::DensityMatrix out;
    out.n_qubits = n_qubits;
    out.entries.resize(dim * dim);
    kernels::kraus_apply_serial(rho.entries.data(), out.entries.data(), dim, qubit, ops);

    std::vector<std::array<oracle::cplx, 4>> oops;
    for (const auto& k : ops) oops.push_back({k[0], k[1], k[2], k[3]});
    const auto want = oracle::kraus_oracle(oracle::from_density(rho), oops, qubit, n_qubits);
    REQUIRE(oracle::max_abs_diff(want, out) < 1e-12);

    hqcgan::qsim::DensityMatrix out2 = out;
    kernels::kraus_apply_omp(rho.entries.data(), out2.entries.data(), dim, qubit, ops);
    for (std::size_t i = 0; i < out.entries.size(); ++i)
      REQUIRE(out.entries[i] == out2.entries[i]);
  }
}

TEST_CASE("poly3_gram_sum matches an explicit double loop", "[kernels]") {
  const std::size_t m = 19, n = 23, dim = 7;
  const auto x = random_vec(m * dim, 55);
  const auto y = random_vec(n * dim, 66);

  auto direct = [&](const std::vector<double>& xs, std::size_t mm,
                    const std::vector<double>& ys, std::size_t nn, bool skip) {
    double total = 0.0;
    for (std::size_t i = 0; i < mm; ++i)
      for (std::size_t j = 0; j < nn; ++j) {
        if (skip && i == j) continue;
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) dot += xs[i * dim + d] * ys[j * dim + d];
        total += std::pow(dot / static_cast<double>(dim) + 1.0, 3.0);
      }
    return total;
  };

  const double got_xy = kernels::poly3_gram_sum_serial(x.data(), m, y.data(), n, dim, false);
  REQUIRE(got_xy == Catch::Approx(direct(x, m, y, n, false)).epsilon(1e-12));

  const double got_xx = kernels::poly3_gram_sum_serial(x.data(), m, x.data(), m, dim, true);
  REQUIRE(got_xx == Catch::Approx(direct(x, m, x, m, true)).epsilon(1e-12));

  REQUIRE(kernels::poly3_gram_sum_omp(x.data(), m, y.data(), n, dim, false) == got_xy);
  REQUIRE(kernels::poly3_gram_sum_omp(x.data(), m, x.data(), m, dim, true) == got_xx);
}

TEST_CASE("matrix wrappers validate shapes", "[linalg]") {
  linalg::Matrix a(2, 3), b(4, 5);
  REQUIRE_THROWS_AS(linalg::matmul(a, b), std::invalid_argument);
  REQUIRE_THROWS_AS(linalg::matmul_nt(a, b), std::invalid_argument);
  REQUIRE_THROWS_AS(linalg::matmul_tn(a, b), std::invalid_argument);

  linalg::Matrix x(2, 2);
  x(0, 0) = 1; x(0, 1) = 2; x(1, 0) = 3; x(1, 1) = 4;
  linalg::Matrix y = linalg::transpose(x);
  REQUIRE(y(0, 1) == 3);
  REQUIRE(y(1, 0) == 2);
  const auto means = linalg::col_means(x);
  REQUIRE(means[0] == Catch::Approx(2.0));
  REQUIRE(means[1] == Catch::Approx(3.0));
}
