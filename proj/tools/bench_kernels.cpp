// Benchmark comparing the serial reference kernels to their OpenMP variants.
// Also asserts bitwise equality of the two on every measured case, since the
// parallel kernels are designed to reproduce the serial results exactly.

#include <chrono>
#include <complex>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hqcgan/kernels.hpp"
#include "hqcgan/rng.hpp"

using namespace hqcgan;
using clock_type = std::chrono::steady_clock;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  rng::Stream s(seed);
  std::vector<double> v(n);
  for (double& x : v) x = s.next_normal();
  return v;
}

template <typename F>
double best_ms(F&& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

int mismatches = 0;

void report(const char* name, double serial_ms, double omp_ms, bool identical) {
  std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", name,
              serial_ms, omp_ms, serial_ms / omp_ms,
              identical ? "bit-identical" : "MISMATCH");
  if (!identical) ++mismatches;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; dispatchers run the serial reference\n\n");
#endif
  const int repeats = 5;

  {
    const std::size_t m = 384, k = 384, n = 384;
    const auto a = random_vec(m * k, 1);
    const auto b = random_vec(k * n, 2);
    std::vector<double> c1(m * n), c2(m * n);
    const double ts = best_ms(
        [&] { kernels::gemm_nn_serial(a.data(), b.data(), c1.data(), m, k, n); }, repeats);
    const double tp = best_ms(
        [&] { kernels::gemm_nn_omp(a.data(), b.data(), c2.data(), m, k, n); }, repeats);
    report("gemm_nn 384x384x384", ts, tp, c1 == c2);

    const double ts2 = best_ms(
        [&] { kernels::gemm_nt_serial(a.data(), b.data(), c1.data(), m, k, n); }, repeats);
    const double tp2 = best_ms(
        [&] { kernels::gemm_nt_omp(a.data(), b.data(), c2.data(), m, k, n); }, repeats);
    report("gemm_nt 384x384x384", ts2, tp2, c1 == c2);

    const double ts3 = best_ms(
        [&] { kernels::gemm_tn_serial(a.data(), b.data(), c1.data(), m, k, n); }, repeats);
    const double tp3 = best_ms(
        [&] { kernels::gemm_tn_omp(a.data(), b.data(), c2.data(), m, k, n); }, repeats);
    report("gemm_tn 384x384x384", ts3, tp3, c1 == c2);
  }

  {
    const std::size_t dim = 512;  // 9-qubit density matrix
    rng::Stream s(3);
    std::vector<std::complex<double>> rho(dim * dim), o1(dim * dim), o2(dim * dim);
    for (auto& v : rho) v = {s.next_normal(), s.next_normal()};
    const double p = 0.05;
    const std::vector<kernels::kraus_op> ops = {
        {std::sqrt(1 - p), 0.0, 0.0, std::sqrt(1 - p)},
        {0.0, std::sqrt(p / 3), std::sqrt(p / 3), 0.0},
        {0.0, std::complex<double>{0, -std::sqrt(p / 3)},
         std::complex<double>{0, std::sqrt(p / 3)}, 0.0},
        {std::sqrt(p / 3), 0.0, 0.0, -std::sqrt(p / 3)},
    };
    const double ts = best_ms(
        [&] { kernels::kraus_apply_serial(rho.data(), o1.data(), dim, 4, ops); }, repeats);
    const double tp = best_ms(
        [&] { kernels::kraus_apply_omp(rho.data(), o2.data(), dim, 4, ops); }, repeats);
    report("kraus_apply dim=512", ts, tp, o1 == o2);
  }

  {
    const std::size_t m = 1024, dim = 64;
    const auto x = random_vec(m * dim, 4);
    const auto y = random_vec(m * dim, 5);
    double r1 = 0, r2 = 0;
    const double ts = best_ms(
        [&] { r1 = kernels::poly3_gram_sum_serial(x.data(), m, y.data(), m, dim, false); },
        repeats);
    const double tp = best_ms(
        [&] { r2 = kernels::poly3_gram_sum_omp(x.data(), m, y.data(), m, dim, false); },
        repeats);
    report("poly3_gram 1024x1024x64", ts, tp, r1 == r2);
  }

  if (mismatches != 0) {
    std::printf("\n%d kernel(s) diverged from the serial reference\n", mismatches);
    return 1;
  }
  return 0;
}
