#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hqcgan/linalg.hpp"

// Noisy density-matrix simulator for the latent-source circuit: a Hadamard on
// every qubit followed by depolarizing and amplitude-damping channels and a
// full computational-basis measurement with classical readout bit flips.
//
// Conventions (fixed across the whole codebase):
//   - basis index i encodes qubit q in bit q (qubit 0 = least significant bit);
//   - bitstrings print most-significant qubit first, so bitstring character j
//     refers to qubit n-1-j;
//   - states are dense 2^n x 2^n complex double matrices, row-major.
namespace hqcgan::qsim {

inline constexpr int kMaxQubits = 10;

struct DensityMatrix {
  int n_qubits = 0;
  std::vector<std::complex<double>> entries;  // dim x dim row-major

  std::size_t dim() const { return std::size_t{1} << n_qubits; }
  std::complex<double>& at(std::size_t i, std::size_t j) { return entries[i * dim() + j]; }
  const std::complex<double>& at(std::size_t i, std::size_t j) const {
    return entries[i * dim() + j];
  }
};

struct NoiseSpec {
  double depolarizing_p = 0.01;        // per Hadamard gate
  double amplitude_damping_gamma = 0.03;  // per qubit, after the gate layer
  double readout_p01 = 0.02;           // P(read 1 | true 0)
  double readout_p10 = 0.02;           // P(read 0 | true 1)

  static NoiseSpec none() { return NoiseSpec{0.0, 0.0, 0.0, 0.0}; }
  // std::invalid_argument when any probability is outside [0, 1].
  void validate() const;

  bool operator==(const NoiseSpec&) const = default;
};

struct CircuitSpec {
  int n_qubits = 3;  // 1..kMaxQubits; the experiments use 3, 5 and 7
  void validate() const;
};

struct OutcomeHistogram {
  int n_qubits = 0;
  std::uint64_t total_shots = 0;
  std::map<std::string, std::uint64_t> counts;  // bitstring -> count
};

// |0...0><0...0| on n qubits.
DensityMatrix init_ground(int n_qubits);

// Single-qubit Hadamard conjugation.
DensityMatrix apply_hadamard(const DensityMatrix& rho, int qubit);
DensityMatrix apply_hadamard_all(const DensityMatrix& rho);

// (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on one qubit.
DensityMatrix apply_depolarizing(const DensityMatrix& rho, double p, int qubit);

// Amplitude damping with K0 = [[1,0],[0,sqrt(1-g)]], K1 = [[0,sqrt(g)],[0,0]].
DensityMatrix apply_amplitude_damping(const DensityMatrix& rho, double gamma, int qubit);

// diag(rho) with imaginary parts dropped, negatives clamped to zero and the
// result renormalized to sum 1. A clamp larger than 1e-8 raises numeric_error.
std::vector<double> measurement_distribution(const DensityMatrix& rho);

// `shots` basis-state indices drawn from `dist` by inverse-CDF sampling, each
// then passed through per-bit readout flips (p01, p10). Deterministic in seed.
std::vector<std::size_t> sample_indices(const std::vector<double>& dist,
                                        std::uint64_t shots, const NoiseSpec& noise,
                                        std::uint64_t seed);

OutcomeHistogram sample_bitstrings(const std::vector<double>& dist, std::uint64_t shots,
                                   const NoiseSpec& noise, std::uint64_t seed);

// <P> for every Pauli string of weight <= max_weight (identity included).
// Full enumeration (max_weight == n) is rejected for n > 3.
std::map<std::string, double> pauli_expectations(const DensityMatrix& rho, int max_weight);

// Per-qubit reduced Bloch vectors (x, y, z), qubit 0 first.
std::vector<std::array<double, 3>> bloch_vectors(const DensityMatrix& rho);

// Re/Im grids of the full density matrix plus basis labels, for bar plots.
struct CityscapeData {
  std::vector<std::string> labels;  // bitstrings, most-significant qubit first
  linalg::Matrix re, im;
};
CityscapeData cityscape_export(const DensityMatrix& rho);

// Hadamard layer -> depolarizing (once per gate) -> amplitude damping (once
// per qubit) -> measurement distribution.
struct PipelineState {
  DensityMatrix rho;
  std::vector<double> dist;
};
PipelineState run_pipeline(const CircuitSpec& circuit, const NoiseSpec& noise);

std::string bitstring_of(std::size_t index, int n_qubits);

// Diagnostics used by tests and state validation.
double trace_deviation(const DensityMatrix& rho);       // |Tr(rho) - 1|
double hermiticity_violation(const DensityMatrix& rho);  // max |rho_ij - conj(rho_ji)|

}  // namespace hqcgan::qsim
