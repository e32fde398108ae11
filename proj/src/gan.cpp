#include "hqcgan/gan.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "hqcgan/errors.hpp"
#include "hqcgan/rng.hpp"
#include "hqcgan/viz.hpp"

namespace hqcgan::gan {
namespace {

std::string pad10(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%010llu", static_cast<unsigned long long>(v));
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Latent supplier that hides the quantum/gaussian split from the loop.
class LatentSupplier {
 public:
  LatentSupplier(const TrainConfig& cfg, latent::ShotLedger& ledger)
      : cfg_(cfg), ledger_(&ledger) {
    if (cfg.is_quantum())
      source_.emplace(qsim::CircuitSpec{cfg.n_qubits}, cfg.noise);
  }

  latent::LatentBatch draw(std::size_t batch, std::uint64_t seed) const {
    if (source_) return source_->sample(batch, seed, *ledger_);
    return latent::sample_gaussian_batch(cfg_.latent_dim, batch, seed);
  }

  // Evaluation draws are charged to a scratch ledger, not the training one.
  latent::LatentBatch draw_unmetered(std::size_t batch, std::uint64_t seed) const {
    latent::ShotLedger scratch;
    if (source_) return source_->sample(batch, seed, scratch);
    return latent::sample_gaussian_batch(cfg_.latent_dim, batch, seed);
  }

 private:
  TrainConfig cfg_;
  latent::ShotLedger* ledger_;
  std::optional<latent::QuantumSource> source_;
};

}  // namespace

void TrainConfig::validate() const {
  if (model == ModelKind::classical) {
    if (latent_dim != 100)
      throw std::invalid_argument("TrainConfig: classical model requires latent_dim "
                                  "100, got " + std::to_string(latent_dim));
  } else {
    if (n_qubits != 3 && n_qubits != 5 && n_qubits != 7)
      throw std::invalid_argument("TrainConfig: hqcgan n_qubits must be 3, 5 or 7, got " +
                                  std::to_string(n_qubits));
    if (latent_dim != static_cast<std::size_t>(n_qubits))
      throw std::invalid_argument(
          "TrainConfig: hqcgan latent_dim must equal n_qubits (" +
          std::to_string(n_qubits) + "), got " + std::to_string(latent_dim));
    noise.validate();
  }
  if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr))
    throw std::invalid_argument("TrainConfig: lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("TrainConfig: betas must lie in [0, 1)");
}

std::string TrainConfig::model_name() const {
  if (model == ModelKind::classical) return "classical";
  return "hqcgan" + std::to_string(n_qubits);
}

Models init_models(const TrainConfig& config) {
  config.validate();
  using A = nnet::Activation;
  Models m;
  m.generator = nnet::dense_net({config.latent_dim, 256, 512, 784},
                                {A::relu, A::relu, A::tanh},
                                rng::derive_seed(config.seed, "init-g"));
  m.discriminator = nnet::dense_net({784, 512, 256, 1},
                                    {A::leaky_relu, A::leaky_relu, A::sigmoid},
                                    rng::derive_seed(config.seed, "init-d"));
  return m;
}

double discriminator_step(nnet::DenseNet& d, nnet::AdamState& d_opt,
                          const nnet::DenseNet& g, const linalg::Matrix& real_batch,
                          const latent::LatentBatch& latents) {
  if (real_batch.rows != latents.vectors.rows)
    throw std::invalid_argument("discriminator_step: real batch has " +
                                std::to_string(real_batch.rows) + " rows but latent batch has " +
                                std::to_string(latents.vectors.rows));
  const std::size_t batch = real_batch.rows;

  const linalg::Matrix fake = nnet::forward(g, latents.vectors).output();
  const auto cache_real = nnet::forward(d, real_batch);
  const auto cache_fake = nnet::forward(d, fake);

  const std::vector<double> ones(batch, 1.0), zeros(batch, 0.0);
  const double loss = 0.5 * nnet::bce_loss(cache_real.output(), ones) +
                      0.5 * nnet::bce_loss(cache_fake.output(), zeros);
  if (!std::isfinite(loss))
    throw numeric_error("discriminator_step: non-finite loss");

  auto grads_real = nnet::backward(d, cache_real, nnet::bce_grad(cache_real.output(), ones));
  auto grads_fake = nnet::backward(d, cache_fake, nnet::bce_grad(cache_fake.output(), zeros));
  nnet::scale_gradients(grads_real, 0.5);
  nnet::scale_gradients(grads_fake, 0.5);
  nnet::adam_step(d, nnet::add_gradients(grads_real, grads_fake), d_opt);
  return loss;
}

double generator_step(const nnet::DenseNet& d, nnet::DenseNet& g,
                      nnet::AdamState& g_opt, const latent::LatentBatch& latents) {
  const std::size_t batch = latents.vectors.rows;
  const auto cache_g = nnet::forward(g, latents.vectors);
  const auto cache_d = nnet::forward(d, cache_g.output());

  const std::vector<double> ones(batch, 1.0);
  const double loss = nnet::bce_loss(cache_d.output(), ones);
  if (!std::isfinite(loss)) throw numeric_error("generator_step: non-finite loss");

  const auto through_d = nnet::backward(d, cache_d, nnet::bce_grad(cache_d.output(), ones));
  const auto grads_g = nnet::backward(g, cache_g, through_d.dinput);
  nnet::adam_step(g, grads_g, g_opt);
  return loss;
}

std::string train_log_header() {
  return "samples_seen,epoch,loss_d,loss_g,wall_seconds_epoch,shots_total";
}

std::string format_log_row(const TrainLogRow& row) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%llu,%zu,%.17g,%.17g,%.3f,%llu",
                static_cast<unsigned long long>(row.samples_seen), row.epoch, row.loss_d,
                row.loss_g, row.wall_seconds_epoch,
                static_cast<unsigned long long>(row.shots_total));
  return buf;
}

TrainResult train(const TrainConfig& config, const dataset::BalancedDataset& data,
                  const std::string& run_dir, const EvalHook& hook) {
  config.validate();
  if (data.count() < config.batch_size)
    throw data_error("train: dataset has " + std::to_string(data.count()) +
                     " rows, smaller than one batch of " +
                     std::to_string(config.batch_size));

  TrainResult result;
  {
    Models models = init_models(config);
    result.generator = std::move(models.generator);
    result.discriminator = std::move(models.discriminator);
  }
  auto d_opt = nnet::AdamState::for_net(result.discriminator, config.lr, config.beta1,
                                        config.beta2);
  auto g_opt = nnet::AdamState::for_net(result.generator, config.lr, config.beta1,
                                        config.beta2);

  latent::ShotLedger ledger;
  const LatentSupplier latents(config, ledger);

  // One fixed latent grid reused at every checkpoint so sample dumps are
  // comparable across training.
  const latent::LatentBatch grid =
      latents.draw_unmetered(kSampleGridSize, rng::derive_seed(config.seed, "sample-grid"));

  dataset::BatchStream stream(data, config.batch_size,
                              rng::derive_seed(config.seed, "batches"));
  const std::size_t batches_per_epoch = stream.batches_per_epoch();
  const std::string model = config.model_name();

  std::ofstream log_file;
  if (!run_dir.empty()) {
    log_file.open(run_dir + "/train.csv", std::ios::trunc);
    if (!log_file)
      throw data_error("train: cannot open " + run_dir + "/train.csv for writing");
    log_file << train_log_header() << "\n";
    log_file.flush();
  }

  auto emit_row = [&](const TrainLogRow& row) {
    result.log.push_back(row);
    if (log_file.is_open()) {
      log_file << format_log_row(row) << "\n";
      log_file.flush();
    }
  };

  auto dump_artifacts = [&](std::uint64_t samples_seen) {
    if (run_dir.empty()) return;
    const std::string tag = model + "_" + pad10(samples_seen);
    nnet::save_net(result.generator, run_dir + "/g_" + tag + ".bin");
    nnet::save_net(result.discriminator, run_dir + "/d_" + tag + ".bin");
    const linalg::Matrix images = nnet::forward(result.generator, grid.vectors).output();
    for (std::size_t i = 0; i < kSampleGridSize; ++i) {
      std::vector<float> pixels(dataset::kImageDim);
      for (std::size_t j = 0; j < dataset::kImageDim; ++j)
        pixels[j] = static_cast<float>(images(i, j));
      char idx[8];
      std::snprintf(idx, sizeof(idx), "%02zu", i);
      viz::write_pgm(pixels, run_dir + "/samples_" + tag + "_" + idx + ".pgm");
    }
  };

  std::uint64_t last_eval_samples = std::uint64_t(-1);
  auto run_eval = [&](std::uint64_t samples_seen, std::size_t epochs_done) {
    if (samples_seen == last_eval_samples) return;
    last_eval_samples = samples_seen;
    dump_artifacts(samples_seen);
    if (hook)
      hook(EvalContext{samples_seen, epochs_done, result.generator,
                       result.discriminator, ledger.total_shots});
  };

  const auto train_start = std::chrono::steady_clock::now();
  run_eval(0, 0);

  std::uint64_t samples_seen = 0;
  std::uint64_t latent_draws = 0;
  std::uint64_t next_eval = config.eval_every_samples;
  linalg::Matrix real(config.batch_size, dataset::kImageDim);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    stream.begin_epoch(epoch);
    double sum_d = 0.0, sum_g = 0.0;
    std::size_t batches_done = 0;

    while (stream.next(real)) {
      const auto z_d = latents.draw(config.batch_size,
                                    rng::derive_seed(config.seed, "latent", latent_draws++));
      double loss_d;
      try {
        loss_d = discriminator_step(result.discriminator, d_opt, result.generator, real,
                                    z_d);
      } catch (const numeric_error& e) {
        throw numeric_error("discriminator_step failed: " + std::string(e.what()) +
                            " (epoch " + std::to_string(epoch + 1) + ", batch " +
                            std::to_string(batches_done + 1) + ")");
      }
      const auto z_g = latents.draw(config.batch_size,
                                    rng::derive_seed(config.seed, "latent", latent_draws++));
      double loss_g;
      try {
        loss_g = generator_step(result.discriminator, result.generator, g_opt, z_g);
      } catch (const numeric_error& e) {
        throw numeric_error("generator_step failed: " + std::string(e.what()) +
                            " (epoch " + std::to_string(epoch + 1) + ", batch " +
                            std::to_string(batches_done + 1) + ")");
      }

      sum_d += loss_d;
      sum_g += loss_g;
      ++batches_done;
      samples_seen += config.batch_size;

      if (config.eval_every_samples > 0 && samples_seen >= next_eval) {
        while (next_eval <= samples_seen) next_eval += config.eval_every_samples;
        run_eval(samples_seen, batches_done == batches_per_epoch ? epoch + 1 : epoch);
        // The epoch row below covers a checkpoint landing on the epoch's end.
        if (batches_done < batches_per_epoch) {
          emit_row(TrainLogRow{samples_seen, epoch + 1,
                               sum_d / static_cast<double>(batches_done),
                               sum_g / static_cast<double>(batches_done),
                               seconds_since(epoch_start), ledger.total_shots});
        }
      }
    }

    emit_row(TrainLogRow{samples_seen, epoch + 1,
                         sum_d / static_cast<double>(batches_done),
                         sum_g / static_cast<double>(batches_done),
                         seconds_since(epoch_start), ledger.total_shots});
  }

  run_eval(samples_seen, config.epochs);

  result.samples_seen = samples_seen;
  result.shots_total = ledger.total_shots;
  result.shots_if_latents_reused = config.is_quantum() ? samples_seen : 0;
  result.wall_seconds_total = seconds_since(train_start);
  return result;
}

}  // namespace hqcgan::gan
