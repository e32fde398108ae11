#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hqcgan/linalg.hpp"
#include "hqcgan/qsim.hpp"

// Latent vector sources for the generator. The quantum source measures the
// noisy Hadamard-layer circuit and maps each shot's bitstring to a +-1 vector
// (component j of z comes from bitstring character j, i.e. '0' -> -1,
// '1' -> +1); the classical baseline draws standard Gaussians. Every quantum
// shot is charged to a ShotLedger.
namespace hqcgan::latent {

struct ShotLedger {
  std::uint64_t total_shots = 0;
  void add(std::uint64_t shots) { total_shots += shots; }
};

enum class SourceKind { quantum, gaussian };

struct LatentBatch {
  linalg::Matrix vectors;          // batch x dim
  SourceKind source = SourceKind::gaussian;
  std::uint64_t shots_consumed = 0;  // quantum only; == batch size
};

// "010" -> (-1, +1, -1). Rejects characters outside {'0', '1'}.
std::vector<double> bitstring_to_latent(const std::string& bits);

// Runs the pipeline for (circuit, noise), draws `batch` shots and maps them
// to +-1 vectors. Charges `batch` shots to the ledger.
LatentBatch sample_quantum_batch(const qsim::CircuitSpec& circuit,
                                 const qsim::NoiseSpec& noise, std::size_t batch,
                                 std::uint64_t seed, ShotLedger& ledger);

// batch x dim standard normal draws; consumes no shots.
LatentBatch sample_gaussian_batch(std::size_t dim, std::size_t batch,
                                  std::uint64_t seed);

// Caches the measurement distribution for a fixed (circuit, noise) pair so a
// training run pays for the density-matrix evolution once; only the shot
// sampling repeats per batch.
class QuantumSource {
 public:
  QuantumSource(const qsim::CircuitSpec& circuit, const qsim::NoiseSpec& noise);
  LatentBatch sample(std::size_t batch, std::uint64_t seed, ShotLedger& ledger) const;
  const std::vector<double>& distribution() const { return dist_; }
  int n_qubits() const { return circuit_.n_qubits; }

 private:
  qsim::CircuitSpec circuit_;
  qsim::NoiseSpec noise_;
  std::vector<double> dist_;
};

}  // namespace hqcgan::latent
