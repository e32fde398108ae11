#include "hqcgan/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hqcgan/errors.hpp"
#include "hqcgan/kernels.hpp"
#include "hqcgan/rng.hpp"

namespace hqcgan::qsim {

namespace {

using kernels::cplx;
using kernels::kraus_op;

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(name) + " must be in [0, 1], got " +
                                std::to_string(p));
}

void check_qubit(const DensityMatrix& rho, int qubit, const char* op) {
  if (qubit < 0 || qubit >= rho.n_qubits)
    throw std::invalid_argument(std::string(op) + ": qubit " + std::to_string(qubit) +
                                " out of range for " + std::to_string(rho.n_qubits) +
                                " qubits");
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<kraus_op>& ops,
                          int qubit) {
  DensityMatrix out;
  out.n_qubits = rho.n_qubits;
  out.entries.resize(rho.entries.size());
  kernels::kraus_apply(rho.entries.data(), out.entries.data(), rho.dim(), qubit, ops);
  return out;
}

}  // namespace

void NoiseSpec::validate() const {
  check_prob(depolarizing_p, "depolarizing_p");
  check_prob(amplitude_damping_gamma, "amplitude_damping_gamma");
  check_prob(readout_p01, "readout_p01");
  check_prob(readout_p10, "readout_p10");
}

void CircuitSpec::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                                "], got " + std::to_string(n_qubits));
}

DensityMatrix init_ground(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("init_ground: n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n_qubits));
  DensityMatrix rho;
  rho.n_qubits = n_qubits;
  rho.entries.assign(rho.dim() * rho.dim(), cplx{0.0, 0.0});
  rho.entries[0] = cplx{1.0, 0.0};
  return rho;
}

DensityMatrix apply_hadamard(const DensityMatrix& rho, int qubit) {
  check_qubit(rho, qubit, "apply_hadamard");
  const double h = 1.0 / std::sqrt(2.0);
  return apply_kraus(rho, {kraus_op{cplx{h, 0}, cplx{h, 0}, cplx{h, 0}, cplx{-h, 0}}},
                     qubit);
}

DensityMatrix apply_hadamard_all(const DensityMatrix& rho) {
  DensityMatrix out = rho;
  for (int q = 0; q < out.n_qubits; ++q) out = apply_hadamard(out, q);
  return out;
}

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double p, int qubit) {
  check_qubit(rho, qubit, "apply_depolarizing");
  check_prob(p, "depolarizing_p");
  const double s0 = std::sqrt(1.0 - p);
  const double s1 = std::sqrt(p / 3.0);
  const std::vector<kraus_op> ops = {
      kraus_op{cplx{s0, 0}, cplx{0, 0}, cplx{0, 0}, cplx{s0, 0}},    // sqrt(1-p) I
      kraus_op{cplx{0, 0}, cplx{s1, 0}, cplx{s1, 0}, cplx{0, 0}},    // sqrt(p/3) X
      kraus_op{cplx{0, 0}, cplx{0, -s1}, cplx{0, s1}, cplx{0, 0}},   // sqrt(p/3) Y
      kraus_op{cplx{s1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-s1, 0}},   // sqrt(p/3) Z
  };
  return apply_kraus(rho, ops, qubit);
}

DensityMatrix apply_amplitude_damping(const DensityMatrix& rho, double gamma, int qubit) {
  check_qubit(rho, qubit, "apply_amplitude_damping");
  check_prob(gamma, "amplitude_damping_gamma");
  const double k = std::sqrt(1.0 - gamma);
  const double g = std::sqrt(gamma);
  const std::vector<kraus_op> ops = {
      kraus_op{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{k, 0}},
      kraus_op{cplx{0, 0}, cplx{g, 0}, cplx{0, 0}, cplx{0, 0}},
  };
  return apply_kraus(rho, ops, qubit);
}

std::vector<double> measurement_distribution(const DensityMatrix& rho) {
  const std::size_t dim = rho.dim();
  std::vector<double> probs(dim);
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = rho.at(i, i).real();
    if (d < -1e-8)
      throw numeric_error("measurement_distribution: diagonal entry " + std::to_string(i) +
                          " is " + std::to_string(d) + ", below -1e-8");
    const double p = std::max(d, 0.0);
    probs[i] = p;
    sum += p;
  }
  if (!(sum > 0.0))
    throw numeric_error("measurement_distribution: diagonal sums to zero");
  for (double& p : probs) p /= sum;
  return probs;
}

std::string bitstring_of(std::size_t index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if ((index >> q) & 1U) s[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
  return s;
}

namespace {

int qubits_from_dist(std::size_t size) {
  if (size < 2 || (size & (size - 1)) != 0)
    throw std::invalid_argument("distribution length must be a power of two >= 2, got " +
                                std::to_string(size));
  int n = 0;
  while ((std::size_t{1} << n) < size) ++n;
  return n;
}

}  // namespace

std::vector<std::size_t> sample_indices(const std::vector<double>& dist,
                                        std::uint64_t shots, const NoiseSpec& noise,
                                        std::uint64_t seed) {
  const int n = qubits_from_dist(dist.size());
  noise.validate();
  if (shots == 0) throw std::invalid_argument("sample_indices: shots must be >= 1");
  double sum = 0.0;
  std::vector<double> cdf(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!(dist[i] >= 0.0))
      throw std::invalid_argument("sample_indices: negative probability at index " +
                                  std::to_string(i));
    sum += dist[i];
    cdf[i] = sum;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("sample_indices: distribution sums to " +
                                std::to_string(sum) + ", expected 1");

  rng::Stream stream(seed);
  std::vector<std::size_t> out;
  out.reserve(shots);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = stream.next_uniform() * sum;
    std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx >= dist.size()) idx = dist.size() - 1;
    // Classical readout noise: each bit flips independently. One uniform is
    // drawn per bit regardless of the flip probabilities so the stream layout
    // is the same for every NoiseSpec.
    for (int q = 0; q < n; ++q) {
      const double r = stream.next_uniform();
      const std::size_t mask = std::size_t{1} << q;
      if (idx & mask) {
        if (r < noise.readout_p10) idx &= ~mask;
      } else {
        if (r < noise.readout_p01) idx |= mask;
      }
    }
    out.push_back(idx);
  }
  return out;
}

OutcomeHistogram sample_bitstrings(const std::vector<double>& dist, std::uint64_t shots,
                                   const NoiseSpec& noise, std::uint64_t seed) {
  const int n = qubits_from_dist(dist.size());
  OutcomeHistogram hist;
  hist.n_qubits = n;
  hist.total_shots = shots;
  for (std::size_t idx : sample_indices(dist, shots, noise, seed))
    ++hist.counts[bitstring_of(idx, n)];
  return hist;
}

namespace {

// <P> = sum_i rho[i, i ^ flip] * prod_q P_q[j_q, i_q]; for each Pauli string
// the only nonzero column per row is i ^ flip, where flip has a bit set for
// every X or Y factor.
double one_pauli_expectation(const DensityMatrix& rho, const std::string& pauli) {
  const int n = rho.n_qubits;
  std::size_t flip = 0;
  for (int j = 0; j < n; ++j) {
    const char c = pauli[static_cast<std::size_t>(j)];
    if (c == 'X' || c == 'Y') flip |= std::size_t{1} << (n - 1 - j);
  }
  cplx acc{0.0, 0.0};
  const std::size_t dim = rho.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    cplx phase{1.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const char c = pauli[static_cast<std::size_t>(j)];
      const int q = n - 1 - j;
      const int bit_i = static_cast<int>((i >> q) & 1U);
      if (c == 'Y') {
        phase *= bit_i ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
      } else if (c == 'Z') {
        if (bit_i) phase = -phase;
      }
    }
    acc += rho.at(i, i ^ flip) * phase;
  }
  if (std::abs(acc.imag()) > 1e-10)
    throw numeric_error("pauli_expectation: <" + pauli + "> has imaginary part " +
                        std::to_string(acc.imag()));
  return acc.real();
}

void enumerate_paulis(int n, int max_weight, std::string& current, int weight,
                      std::vector<std::string>& out) {
  if (static_cast<int>(current.size()) == n) {
    out.push_back(current);
    return;
  }
  for (char c : {'I', 'X', 'Y', 'Z'}) {
    const int w = weight + (c != 'I' ? 1 : 0);
    if (w > max_weight) continue;
    current.push_back(c);
    enumerate_paulis(n, max_weight, current, w, out);
    current.pop_back();
  }
}

}  // namespace

std::map<std::string, double> pauli_expectations(const DensityMatrix& rho, int max_weight) {
  const int n = rho.n_qubits;
  if (max_weight < 0 || max_weight > n)
    throw std::invalid_argument("pauli_expectations: max_weight must be in [0, " +
                                std::to_string(n) + "], got " + std::to_string(max_weight));
  if (n > 3 && max_weight == n)
    throw std::invalid_argument(
        "pauli_expectations: full enumeration is limited to n <= 3 (requested n = " +
        std::to_string(n) + ")");
  std::vector<std::string> paulis;
  std::string current;
  enumerate_paulis(n, max_weight, current, 0, paulis);
  std::map<std::string, double> out;
  for (const std::string& p : paulis) out[p] = one_pauli_expectation(rho, p);
  return out;
}

std::vector<std::array<double, 3>> bloch_vectors(const DensityMatrix& rho) {
  const int n = rho.n_qubits;
  const std::size_t dim = rho.dim();
  std::vector<std::array<double, 3>> out(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    const std::size_t mask = std::size_t{1} << q;
    cplx r00{0, 0}, r01{0, 0}, r11{0, 0};
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & mask) continue;  // enumerate configurations with qubit q = 0
      r00 += rho.at(i, i);
      r01 += rho.at(i, i | mask);
      r11 += rho.at(i | mask, i | mask);
    }
    out[static_cast<std::size_t>(q)] = {2.0 * r01.real(), -2.0 * r01.imag(),
                                        (r00 - r11).real()};
  }
  return out;
}

CityscapeData cityscape_export(const DensityMatrix& rho) {
  const std::size_t dim = rho.dim();
  CityscapeData data;
  data.labels.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) data.labels.push_back(bitstring_of(i, rho.n_qubits));
  data.re = linalg::Matrix(dim, dim);
  data.im = linalg::Matrix(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      data.re(i, j) = rho.at(i, j).real();
      data.im(i, j) = rho.at(i, j).imag();
    }
  return data;
}

PipelineState run_pipeline(const CircuitSpec& circuit, const NoiseSpec& noise) {
  circuit.validate();
  noise.validate();
  DensityMatrix rho = init_ground(circuit.n_qubits);
  for (int q = 0; q < circuit.n_qubits; ++q) rho = apply_hadamard(rho, q);
  for (int q = 0; q < circuit.n_qubits; ++q)
    rho = apply_depolarizing(rho, noise.depolarizing_p, q);
  for (int q = 0; q < circuit.n_qubits; ++q)
    rho = apply_amplitude_damping(rho, noise.amplitude_damping_gamma, q);
  PipelineState state;
  state.dist = measurement_distribution(rho);
  state.rho = std::move(rho);
  return state;
}

double trace_deviation(const DensityMatrix& rho) {
  cplx tr{0, 0};
  for (std::size_t i = 0; i < rho.dim(); ++i) tr += rho.at(i, i);
  return std::abs(tr - cplx{1.0, 0.0});
}

double hermiticity_violation(const DensityMatrix& rho) {
  double worst = 0.0;
  const std::size_t dim = rho.dim();
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j)
      worst = std::max(worst, std::abs(rho.at(i, j) - std::conj(rho.at(j, i))));
  return worst;
}

}  // namespace hqcgan::qsim
