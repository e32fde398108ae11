#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hqcgan/dataset.hpp"
#include "hqcgan/latent.hpp"
#include "hqcgan/nnet.hpp"
#include "hqcgan/qsim.hpp"

// Adversarial training loop. Each iteration runs one discriminator update
// (real batch labelled 1, generated batch labelled 0, loss
// -1/2 [log D(x) + log(1 - D(G(z)))]) followed by one generator update with
// the non-saturating loss -log D(G(z)). Latent batches for the two steps are
// drawn independently, so a quantum run consumes 2 * batch_size shots per
// iteration; both that actual count and the would-be count under latent reuse
// are reported.
namespace hqcgan::gan {

inline constexpr std::size_t kSampleGridSize = 16;

enum class ModelKind { classical, hqcgan };

struct TrainConfig {
  ModelKind model = ModelKind::classical;
  int n_qubits = 0;              // 3, 5 or 7 when model == hqcgan
  std::size_t latent_dim = 100;  // must equal 100 (classical) or n_qubits (hqcgan)
  std::size_t epochs = 150;
  std::size_t batch_size = 64;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::uint64_t eval_every_samples = 100000;  // 0 disables mid-training evals
  std::uint64_t seed = 1;
  qsim::NoiseSpec noise;  // used by hqcgan models only

  // std::invalid_argument on violations (latent-dim pairing, qubit count,
  // batch size, learning rate, noise probabilities).
  void validate() const;
  bool is_quantum() const { return model == ModelKind::hqcgan; }
  std::string model_name() const;  // "classical", "hqcgan3", "hqcgan5", "hqcgan7"

  bool operator==(const TrainConfig&) const = default;
};

struct TrainLogRow {
  std::uint64_t samples_seen = 0;
  std::size_t epoch = 0;  // 1-based
  double loss_d = 0.0;    // mean over the current epoch's completed batches
  double loss_g = 0.0;
  double wall_seconds_epoch = 0.0;
  std::uint64_t shots_total = 0;
};

struct Models {
  nnet::DenseNet generator;      // latent_dim -> 256 -> 512 -> 784
  nnet::DenseNet discriminator;  // 784 -> 512 -> 256 -> 1
};

// Seeded network initialization (weights N(0, 0.02^2), zero biases).
Models init_models(const TrainConfig& config);

// One discriminator update. Returns the loss value; G stays untouched.
// Non-finite loss raises numeric_error.
double discriminator_step(nnet::DenseNet& d, nnet::AdamState& d_opt,
                          const nnet::DenseNet& g, const linalg::Matrix& real_batch,
                          const latent::LatentBatch& latents);

// One generator update through a frozen discriminator. Returns the loss.
double generator_step(const nnet::DenseNet& d, nnet::DenseNet& g,
                      nnet::AdamState& g_opt, const latent::LatentBatch& latents);

struct EvalContext {
  std::uint64_t samples_seen = 0;
  std::size_t epoch = 0;  // epochs completed when the hook fires
  const nnet::DenseNet& generator;
  const nnet::DenseNet& discriminator;
  std::uint64_t shots_total = 0;
};
using EvalHook = std::function<void(const EvalContext&)>;

struct TrainResult {
  nnet::DenseNet generator;
  nnet::DenseNet discriminator;
  std::vector<TrainLogRow> log;
  std::uint64_t samples_seen = 0;
  std::uint64_t shots_total = 0;             // actual quantum shots charged
  std::uint64_t shots_if_latents_reused = 0; // the one-draw-per-iteration reading
  double wall_seconds_total = 0.0;
};

// Runs the full loop over seeded epoch shuffles of `data`. When `run_dir` is
// non-empty it receives train.csv (one row per epoch plus one per eval
// checkpoint), generator/discriminator checkpoints and a fixed-latent grid of
// kSampleGridSize PGM samples at every evaluation point (samples_seen = 0,
// every eval_every_samples, and the end of training). The hook, when set,
// fires at those same points. Evaluation never consumes logged shots.
TrainResult train(const TrainConfig& config, const dataset::BalancedDataset& data,
                  const std::string& run_dir, const EvalHook& hook);

// CSV header + row formatting shared by train() and the report tooling.
std::string train_log_header();
std::string format_log_row(const TrainLogRow& row);

}  // namespace hqcgan::gan
