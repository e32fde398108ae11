#include "hqcgan/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hqcgan/binio.hpp"
#include "hqcgan/errors.hpp"
#include "hqcgan/rng.hpp"

namespace hqcgan::nnet {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::none: return "none";
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  for (Activation a : {Activation::none, Activation::relu, Activation::leaky_relu,
                       Activation::tanh, Activation::sigmoid})
    if (name == activation_name(a)) return a;
  throw std::invalid_argument("unknown activation: " + name);
}

std::size_t DenseNet::input_dim() const {
  return layers.empty() ? 0 : layers.front().w.cols;
}

std::size_t DenseNet::output_dim() const {
  return layers.empty() ? 0 : layers.back().w.rows;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.w.data.size() + l.b.size();
  return n;
}

void DenseNet::validate() const {
  if (layers.empty()) throw std::invalid_argument("DenseNet: no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.w.rows == 0 || l.w.cols == 0)
      throw std::invalid_argument("DenseNet: layer " + std::to_string(i) + " is empty");
    if (l.b.size() != l.w.rows)
      throw std::invalid_argument("DenseNet: layer " + std::to_string(i) +
                                  " bias size does not match rows");
    if (i > 0 && l.w.cols != layers[i - 1].w.rows)
      throw std::invalid_argument("DenseNet: layer " + std::to_string(i) +
                                  " input dim does not chain");
    if (!linalg::all_finite(l.w))
      throw numeric_error("DenseNet: non-finite weight in layer " + std::to_string(i));
    for (double v : l.b)
      if (!std::isfinite(v))
        throw numeric_error("DenseNet: non-finite bias in layer " + std::to_string(i));
  }
}

DenseNet dense_net(const std::vector<std::size_t>& dims,
                   const std::vector<Activation>& acts, std::uint64_t seed,
                   double init_std, double leaky_slope) {
  if (dims.size() < 2)
    throw std::invalid_argument("dense_net: need at least input and output dims");
  if (acts.size() != dims.size() - 1)
    throw std::invalid_argument("dense_net: need one activation per layer");
  rng::Stream stream(seed);
  DenseNet net;
  net.layers.resize(dims.size() - 1);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer& l = net.layers[i];
    l.w = linalg::Matrix(dims[i + 1], dims[i]);
    for (double& v : l.w.data) v = init_std * stream.next_normal();
    l.b.assign(dims[i + 1], 0.0);
    l.act = acts[i];
    l.leaky_slope = leaky_slope;
  }
  net.validate();
  return net;
}

namespace {

inline double activate(Activation a, double z, double slope) {
  switch (a) {
    case Activation::none: return z;
    case Activation::relu: return z >= 0.0 ? z : 0.0;
    case Activation::leaky_relu: return z >= 0.0 ? z : slope * z;
    case Activation::tanh: return std::tanh(z);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Derivative in terms of the pre-activation z and the activation value a.
inline double activate_grad(Activation act, double z, double a, double slope) {
  switch (act) {
    case Activation::none: return 1.0;
    case Activation::relu: return z >= 0.0 ? 1.0 : 0.0;
    case Activation::leaky_relu: return z >= 0.0 ? 1.0 : slope;
    case Activation::tanh: return 1.0 - a * a;
    case Activation::sigmoid: return a * (1.0 - a);
  }
  return 1.0;
}

}  // namespace

ForwardCache forward(const DenseNet& net, const linalg::Matrix& x) {
  if (net.layers.empty()) throw std::invalid_argument("forward: empty net");
  if (x.cols != net.input_dim())
    throw std::invalid_argument("forward: input dim " + std::to_string(x.cols) +
                                " does not match net input " +
                                std::to_string(net.input_dim()));
  ForwardCache cache;
  cache.inputs.reserve(net.layers.size() + 1);
  cache.preacts.reserve(net.layers.size());
  cache.inputs.push_back(x);
  for (const Layer& l : net.layers) {
    linalg::Matrix z = linalg::matmul_nt(cache.inputs.back(), l.w);
    for (std::size_t r = 0; r < z.rows; ++r) {
      double* zr = z.row(r);
      for (std::size_t j = 0; j < z.cols; ++j) zr[j] += l.b[j];
    }
    linalg::Matrix a(z.rows, z.cols);
    for (std::size_t i = 0; i < z.data.size(); ++i)
      a.data[i] = activate(l.act, z.data[i], l.leaky_slope);
    cache.preacts.push_back(std::move(z));
    cache.inputs.push_back(std::move(a));
  }
  return cache;
}

namespace {

double clamp_prob(double p) {
  return std::min(1.0 - kBceEps, std::max(kBceEps, p));
}

void check_bce_args(const linalg::Matrix& pred, const std::vector<double>& targets) {
  if (pred.cols != 1)
    throw std::invalid_argument("bce: prediction must be batch x 1, got cols = " +
                                std::to_string(pred.cols));
  if (pred.rows != targets.size())
    throw std::invalid_argument("bce: batch size " + std::to_string(pred.rows) +
                                " does not match " + std::to_string(targets.size()) +
                                " targets");
  if (pred.rows == 0) throw std::invalid_argument("bce: empty batch");
}

}  // namespace

double bce_loss(const linalg::Matrix& pred, const std::vector<double>& targets) {
  check_bce_args(pred, targets);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.rows; ++i) {
    const double p = clamp_prob(pred(i, 0));
    const double t = targets[i];
    total += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
  }
  return total / static_cast<double>(pred.rows);
}

linalg::Matrix bce_grad(const linalg::Matrix& pred, const std::vector<double>& targets) {
  check_bce_args(pred, targets);
  linalg::Matrix g(pred.rows, 1);
  const double scale = 1.0 / static_cast<double>(pred.rows);
  for (std::size_t i = 0; i < pred.rows; ++i) {
    const double p = clamp_prob(pred(i, 0));
    const double t = targets[i];
    g(i, 0) = scale * (-t / p + (1.0 - t) / (1.0 - p));
  }
  return g;
}

Gradients backward(const DenseNet& net, const ForwardCache& cache,
                   const linalg::Matrix& upstream) {
  const std::size_t n_layers = net.layers.size();
  if (cache.inputs.size() != n_layers + 1 || cache.preacts.size() != n_layers)
    throw std::invalid_argument("backward: cache does not match the net (missing or "
                                "stale forward pass)");
  for (std::size_t i = 0; i < n_layers; ++i) {
    if (cache.preacts[i].cols != net.layers[i].w.rows ||
        cache.inputs[i].cols != net.layers[i].w.cols)
      throw std::invalid_argument("backward: cache shapes do not match layer " +
                                  std::to_string(i));
  }
  if (!upstream.same_shape(cache.inputs.back()))
    throw std::invalid_argument("backward: upstream gradient shape mismatch");

  Gradients g;
  g.dw.resize(n_layers);
  g.db.resize(n_layers);
  linalg::Matrix da = upstream;
  for (std::size_t li = n_layers; li-- > 0;) {
    const Layer& l = net.layers[li];
    const linalg::Matrix& z = cache.preacts[li];
    const linalg::Matrix& a = cache.inputs[li + 1];
    linalg::Matrix dz(da.rows, da.cols);
    for (std::size_t i = 0; i < dz.data.size(); ++i)
      dz.data[i] = da.data[i] * activate_grad(l.act, z.data[i], a.data[i], l.leaky_slope);
    g.dw[li] = linalg::matmul_tn(dz, cache.inputs[li]);  // out x in
    g.db[li] = linalg::col_sums(dz);
    da = linalg::matmul(dz, l.w);  // batch x in
  }
  g.dinput = std::move(da);
  return g;
}

Gradients add_gradients(const Gradients& a, const Gradients& b) {
  if (a.dw.size() != b.dw.size())
    throw std::invalid_argument("add_gradients: layer count mismatch");
  Gradients out = a;
  for (std::size_t i = 0; i < out.dw.size(); ++i) {
    if (!out.dw[i].same_shape(b.dw[i]))
      throw std::invalid_argument("add_gradients: shape mismatch at layer " +
                                  std::to_string(i));
    for (std::size_t j = 0; j < out.dw[i].data.size(); ++j)
      out.dw[i].data[j] += b.dw[i].data[j];
    for (std::size_t j = 0; j < out.db[i].size(); ++j) out.db[i][j] += b.db[i][j];
  }
  if (out.dinput.same_shape(b.dinput))
    for (std::size_t j = 0; j < out.dinput.data.size(); ++j)
      out.dinput.data[j] += b.dinput.data[j];
  return out;
}

void scale_gradients(Gradients& g, double factor) {
  for (auto& m : g.dw)
    for (double& v : m.data) v *= factor;
  for (auto& b : g.db)
    for (double& v : b) v *= factor;
  for (double& v : g.dinput.data) v *= factor;
}

AdamState AdamState::for_net(const DenseNet& net, double lr, double beta1, double beta2,
                             double eps) {
  AdamState s;
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  for (const Layer& l : net.layers) {
    s.m_w.emplace_back(l.w.rows, l.w.cols);
    s.v_w.emplace_back(l.w.rows, l.w.cols);
    s.m_b.emplace_back(l.b.size(), 0.0);
    s.v_b.emplace_back(l.b.size(), 0.0);
  }
  return s;
}

void adam_step(DenseNet& net, const Gradients& grads, AdamState& state) {
  if (grads.dw.size() != net.layers.size() || state.m_w.size() != net.layers.size())
    throw std::invalid_argument("adam_step: gradient/state layer count mismatch");
  for (std::size_t i = 0; i < grads.dw.size(); ++i) {
    if (!linalg::all_finite(grads.dw[i]))
      throw numeric_error("adam_step: non-finite weight gradient in layer " +
                          std::to_string(i));
    for (double v : grads.db[i])
      if (!std::isfinite(v))
        throw numeric_error("adam_step: non-finite bias gradient in layer " +
                            std::to_string(i));
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    Layer& l = net.layers[li];
    auto update = [&](double& param, double g, double& m, double& v) {
      m = state.beta1 * m + (1.0 - state.beta1) * g;
      v = state.beta2 * v + (1.0 - state.beta2) * g * g;
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      param -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    };
    for (std::size_t j = 0; j < l.w.data.size(); ++j)
      update(l.w.data[j], grads.dw[li].data[j], state.m_w[li].data[j],
             state.v_w[li].data[j]);
    for (std::size_t j = 0; j < l.b.size(); ++j)
      update(l.b[j], grads.db[li][j], state.m_b[li][j], state.v_b[li][j]);
  }
}

namespace {
constexpr char kNetMagic[4] = {'H', 'Q', 'N', '1'};
}

void save_net(const DenseNet& net, const std::string& path) {
  net.validate();
  std::ostringstream out(std::ios::binary);
  out.write(kNetMagic, 4);
  binio::write_u32_le(out, static_cast<std::uint32_t>(net.layers.size()));
  for (const Layer& l : net.layers) {
    binio::write_u32_le(out, static_cast<std::uint32_t>(l.w.rows));
    binio::write_u32_le(out, static_cast<std::uint32_t>(l.w.cols));
    binio::write_u32_le(out, static_cast<std::uint32_t>(l.act));
    binio::write_f64_le(out, l.leaky_slope);
    for (double v : l.w.data) binio::write_f64_le(out, v);
    for (double v : l.b) binio::write_f64_le(out, v);
  }
  binio::write_file(path, out.str());
}

DenseNet load_net(const std::string& path) {
  binio::Reader in(binio::read_file(path), path);
  const unsigned char* magic = in.take(4);
  if (!std::equal(magic, magic + 4, kNetMagic))
    throw data_error("bad checkpoint magic in " + path);
  const std::uint32_t n_layers = in.read_u32_le();
  if (n_layers == 0 || n_layers > 64)
    throw data_error("implausible layer count " + std::to_string(n_layers) + " in " + path);
  DenseNet net;
  net.layers.resize(n_layers);
  for (Layer& l : net.layers) {
    const std::uint32_t rows = in.read_u32_le();
    const std::uint32_t cols = in.read_u32_le();
    const std::uint32_t act = in.read_u32_le();
    if (act > static_cast<std::uint32_t>(Activation::sigmoid))
      throw data_error("bad activation code in " + path);
    if (rows == 0 || cols == 0 || rows > 100000 || cols > 100000)
      throw data_error("implausible layer shape in " + path);
    l.act = static_cast<Activation>(act);
    l.leaky_slope = in.read_f64_le();
    l.w = linalg::Matrix(rows, cols);
    for (double& v : l.w.data) v = in.read_f64_le();
    l.b.resize(rows);
    for (double& v : l.b) v = in.read_f64_le();
  }
  if (in.remaining() != 0) throw data_error("trailing bytes in checkpoint " + path);
  net.validate();
  return net;
}

}  // namespace hqcgan::nnet
