#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hqcgan/linalg.hpp"

// Minimal dense-network engine: fully-connected layers with per-layer
// activations, mean binary cross-entropy, reverse-mode gradients and Adam.
// Forward passes return an external activation cache so nets can stay const
// while another net's update step runs.
namespace hqcgan::nnet {

enum class Activation { none, relu, leaky_relu, tanh, sigmoid };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct Layer {
  linalg::Matrix w;         // out x in
  std::vector<double> b;    // out
  Activation act = Activation::none;
  double leaky_slope = 0.2;  // used by leaky_relu only
};

struct DenseNet {
  std::vector<Layer> layers;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t parameter_count() const;
  // Checks layer chaining and parameter finiteness; throws on violation.
  void validate() const;
};

// Layers sized dims[0] -> dims[1] -> ... -> dims.back() with acts[i] applied
// after layer i. Weights are N(0, init_std^2) draws from the seeded stream,
// biases start at zero.
DenseNet dense_net(const std::vector<std::size_t>& dims,
                   const std::vector<Activation>& acts, std::uint64_t seed,
                   double init_std = 0.02, double leaky_slope = 0.2);

struct ForwardCache {
  // inputs[0] is the batch input; inputs[i+1] the activation of layer i.
  std::vector<linalg::Matrix> inputs;
  std::vector<linalg::Matrix> preacts;  // pre-activation of layer i
  const linalg::Matrix& output() const { return inputs.back(); }
};

ForwardCache forward(const DenseNet& net, const linalg::Matrix& x);

// Mean over the batch of -[t log p + (1-t) log(1-p)], with p clamped to
// [eps, 1-eps], eps = 1e-7. pred must be batch x 1.
inline constexpr double kBceEps = 1e-7;
double bce_loss(const linalg::Matrix& pred, const std::vector<double>& targets);
// d(mean loss)/d(pred), same clamping.
linalg::Matrix bce_grad(const linalg::Matrix& pred, const std::vector<double>& targets);

struct Gradients {
  std::vector<linalg::Matrix> dw;
  std::vector<std::vector<double>> db;
  linalg::Matrix dinput;  // gradient w.r.t. the batch input
};

// Reverse-mode pass. `upstream` is d(loss)/d(output), batch x output_dim.
// The cache must come from forward() on the same net and batch; a mismatched
// cache is rejected.
Gradients backward(const DenseNet& net, const ForwardCache& cache,
                   const linalg::Matrix& upstream);

// Adds two gradient sets (same structure).
Gradients add_gradients(const Gradients& a, const Gradients& b);
void scale_gradients(Gradients& g, double factor);

struct AdamState {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t t = 0;
  std::vector<linalg::Matrix> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;

  static AdamState for_net(const DenseNet& net, double lr, double beta1, double beta2,
                           double eps = 1e-8);
};

// One Adam update in place. Non-finite gradients raise numeric_error.
void adam_step(DenseNet& net, const Gradients& grads, AdamState& state);

// Little-endian binary checkpoints.
void save_net(const DenseNet& net, const std::string& path);
DenseNet load_net(const std::string& path);

}  // namespace hqcgan::nnet
