#include "hqcgan/latent.hpp"

#include <stdexcept>

#include "hqcgan/rng.hpp"

namespace hqcgan::latent {

std::vector<double> bitstring_to_latent(const std::string& bits) {
  if (bits.empty()) throw std::invalid_argument("bitstring_to_latent: empty string");
  std::vector<double> z(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '0') {
      z[j] = -1.0;
    } else if (bits[j] == '1') {
      z[j] = 1.0;
    } else {
      throw std::invalid_argument("bitstring_to_latent: invalid character '" +
                                  std::string(1, bits[j]) + "'");
    }
  }
  return z;
}

QuantumSource::QuantumSource(const qsim::CircuitSpec& circuit, const qsim::NoiseSpec& noise)
    : circuit_(circuit), noise_(noise) {
  dist_ = qsim::run_pipeline(circuit, noise).dist;
}

LatentBatch QuantumSource::sample(std::size_t batch, std::uint64_t seed,
                                  ShotLedger& ledger) const {
  if (batch == 0) throw std::invalid_argument("QuantumSource::sample: empty batch");
  const int n = circuit_.n_qubits;
  LatentBatch out;
  out.source = SourceKind::quantum;
  out.vectors = linalg::Matrix(batch, static_cast<std::size_t>(n));
  const auto indices = qsim::sample_indices(dist_, batch, noise_, seed);
  for (std::size_t row = 0; row < batch; ++row) {
    // Bitstring character j addresses qubit n-1-j; z_j follows the character.
    const std::size_t idx = indices[row];
    for (int j = 0; j < n; ++j) {
      const int q = n - 1 - j;
      out.vectors(row, static_cast<std::size_t>(j)) = ((idx >> q) & 1U) ? 1.0 : -1.0;
    }
  }
  out.shots_consumed = batch;
  ledger.add(batch);
  return out;
}

LatentBatch sample_quantum_batch(const qsim::CircuitSpec& circuit,
                                 const qsim::NoiseSpec& noise, std::size_t batch,
                                 std::uint64_t seed, ShotLedger& ledger) {
  return QuantumSource(circuit, noise).sample(batch, seed, ledger);
}

LatentBatch sample_gaussian_batch(std::size_t dim, std::size_t batch,
                                  std::uint64_t seed) {
  if (dim == 0 || batch == 0)
    throw std::invalid_argument("sample_gaussian_batch: dim and batch must be >= 1");
  LatentBatch out;
  out.source = SourceKind::gaussian;
  out.vectors = linalg::Matrix(batch, dim);
  rng::Stream stream(seed);
  for (double& v : out.vectors.data) v = stream.next_normal();
  out.shots_consumed = 0;
  return out;
}

}  // namespace hqcgan::latent
