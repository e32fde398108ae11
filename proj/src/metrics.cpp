#include "hqcgan/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hqcgan/errors.hpp"
#include "hqcgan/kernels.hpp"
#include "hqcgan/rng.hpp"

namespace hqcgan::metrics {

namespace {

constexpr std::size_t kInputDim = 784;
// The projection matrix must be identical across runs and models for the
// scores to be comparable, so its stream is keyed by a fixed constant and the
// output width, never by the run seed.
constexpr std::uint64_t kProjectionSeedBase = 0x52503634u;  // "RP64"

Eigen::MatrixXd to_eigen(const linalg::Matrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

}  // namespace

Embedding::Embedding(Kind kind, std::size_t k, std::string name)
    : kind_(kind), k_(k), name_(std::move(name)) {}

Embedding Embedding::raw_pixels() {
  Embedding e(Kind::raw_pixels, kInputDim, "raw");
  e.fitted_ = true;
  return e;
}

Embedding Embedding::pca(std::size_t k) {
  if (k == 0 || k > kInputDim)
    throw std::invalid_argument("pca embedding: k must be in [1, 784], got " +
                                std::to_string(k));
  return Embedding(Kind::pca, k, "pca" + std::to_string(k));
}

Embedding Embedding::random_projection(std::size_t k, std::uint64_t seed) {
  if (k == 0)
    throw std::invalid_argument("random_projection embedding: k must be >= 1");
  Embedding e(Kind::random_projection, k, "rp" + std::to_string(k));
  e.basis_ = linalg::Matrix(k, kInputDim);
  rng::Stream stream(rng::derive_seed(seed, "random-projection", k));
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (double& v : e.basis_.data) v = scale * stream.next_normal();
  e.fitted_ = true;
  return e;
}

Embedding Embedding::from_name(const std::string& name) {
  if (name == "raw") return raw_pixels();
  auto parse_k = [&](std::size_t prefix_len) {
    const std::string digits = name.substr(prefix_len);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad embedding name: " + name);
    return static_cast<std::size_t>(std::stoul(digits));
  };
  if (name.rfind("pca", 0) == 0) return pca(parse_k(3));
  if (name.rfind("rp", 0) == 0) return random_projection(parse_k(2), kProjectionSeedBase);
  throw std::invalid_argument("unknown embedding: " + name +
                              " (expected raw, pca<k> or rp<k>)");
}

bool Embedding::needs_fit() const { return kind_ == Kind::pca && !fitted_; }

void Embedding::fit(const linalg::Matrix& real_features) {
  if (kind_ != Kind::pca) return;
  if (fitted_) throw usage_error("embedding " + name_ + " is already fitted");
  if (real_features.cols != kInputDim)
    throw std::invalid_argument("embedding fit: expected 784 columns, got " +
                                std::to_string(real_features.cols));
  if (real_features.rows < 2)
    throw std::invalid_argument("embedding fit: need at least 2 samples");

  const GaussianSummary summary = gaussian_summary(real_features);
  mean_ = summary.mean;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(summary.cov));
  if (es.info() != Eigen::Success)
    throw numeric_error("embedding fit: eigendecomposition failed");
  // Eigen returns eigenvalues in ascending order; take the top k columns.
  basis_ = linalg::Matrix(k_, kInputDim);
  for (std::size_t c = 0; c < k_; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(kInputDim - 1 - c);
    // Deterministic sign: the largest-magnitude component is positive.
    Eigen::Index arg = 0;
    es.eigenvectors().col(col).cwiseAbs().maxCoeff(&arg);
    const double sign = es.eigenvectors()(arg, col) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < kInputDim; ++j)
      basis_(c, j) = sign * es.eigenvectors()(static_cast<Eigen::Index>(j), col);
  }
  fitted_ = true;
}

std::size_t Embedding::output_dim() const {
  return kind_ == Kind::raw_pixels ? kInputDim : k_;
}

linalg::Matrix Embedding::embed(const linalg::Matrix& batch) const {
  if (batch.cols != kInputDim)
    throw std::invalid_argument("embed: expected 784 columns, got " +
                                std::to_string(batch.cols));
  if (kind_ == Kind::raw_pixels) return batch;
  if (kind_ == Kind::pca) {
    if (!fitted_) throw usage_error("pca embedding used before fit()");
    linalg::Matrix centered = batch;
    for (std::size_t i = 0; i < centered.rows; ++i) {
      double* row = centered.row(i);
      for (std::size_t j = 0; j < kInputDim; ++j) row[j] -= mean_[j];
    }
    return linalg::matmul_nt(centered, basis_);
  }
  return linalg::matmul_nt(batch, basis_);
}

GaussianSummary gaussian_summary(const linalg::Matrix& features) {
  if (features.rows < 2)
    throw std::invalid_argument("gaussian_summary: need >= 2 samples, got " +
                                std::to_string(features.rows));
  GaussianSummary s;
  s.sample_count = features.rows;
  s.mean = linalg::col_means(features);
  linalg::Matrix centered = features;
  for (std::size_t i = 0; i < centered.rows; ++i) {
    double* row = centered.row(i);
    for (std::size_t j = 0; j < centered.cols; ++j) row[j] -= s.mean[j];
  }
  s.cov = linalg::matmul_tn(centered, centered);
  const double scale = 1.0 / static_cast<double>(features.rows - 1);
  for (double& v : s.cov.data) v *= scale;
  return s;
}

namespace {

void check_symmetric_square(const linalg::Matrix& s, const char* name) {
  if (s.rows != s.cols)
    throw std::invalid_argument(std::string(name) + " is not square");
  for (std::size_t i = 0; i < s.rows; ++i)
    for (std::size_t j = i + 1; j < s.cols; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-9)
        throw numeric_error(std::string(name) + " is not symmetric at (" +
                            std::to_string(i) + ", " + std::to_string(j) + ")");
}

}  // namespace

double sqrt_product_trace(const linalg::Matrix& s_r, const linalg::Matrix& s_g) {
  if (s_r.rows != s_g.rows || s_r.cols != s_g.cols)
    throw std::invalid_argument("sqrt_product_trace: dimension mismatch");
  check_symmetric_square(s_r, "S_r");
  check_symmetric_square(s_g, "S_g");

  const Eigen::MatrixXd a = to_eigen(s_r);
  const Eigen::MatrixXd b = to_eigen(s_g);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_a(a);
  if (es_a.info() != Eigen::Success)
    throw numeric_error("sqrt_product_trace: eigendecomposition of S_r failed");
  Eigen::VectorXd lam = es_a.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-6)
      throw numeric_error("sqrt_product_trace: S_r eigenvalue " + std::to_string(lam(i)) +
                          " below -1e-6");
    lam(i) = std::sqrt(std::max(0.0, lam(i)));
  }
  // A = S_r^{1/2}; B = A S_g A is symmetric PSD with the same spectrum as
  // S_r S_g, so Tr((S_r S_g)^{1/2}) = sum sqrt(eig(B)).
  const Eigen::MatrixXd root =
      es_a.eigenvectors() * lam.asDiagonal() * es_a.eigenvectors().transpose();
  Eigen::MatrixXd inner = root * b * root;
  inner = 0.5 * (inner + inner.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_b(inner);
  if (es_b.info() != Eigen::Success)
    throw numeric_error("sqrt_product_trace: eigendecomposition of S_r^1/2 S_g S_r^1/2 failed");
  double trace = 0.0;
  for (Eigen::Index i = 0; i < es_b.eigenvalues().size(); ++i) {
    const double ev = es_b.eigenvalues()(i);
    if (ev < -1e-6)
      throw numeric_error("sqrt_product_trace: product eigenvalue " + std::to_string(ev) +
                          " below -1e-6");
    trace += std::sqrt(std::max(0.0, ev));
  }
  return trace;
}

double fid(const GaussianSummary& real, const GaussianSummary& gen) {
  if (real.mean.size() != gen.mean.size())
    throw std::invalid_argument("fid: feature dimension mismatch (" +
                                std::to_string(real.mean.size()) + " vs " +
                                std::to_string(gen.mean.size()) + ")");
  double mean_term = 0.0;
  for (std::size_t j = 0; j < real.mean.size(); ++j) {
    const double d = real.mean[j] - gen.mean[j];
    mean_term += d * d;
  }
  double trace_term = 0.0;
  for (std::size_t i = 0; i < real.cov.rows; ++i)
    trace_term += real.cov(i, i) + gen.cov(i, i);
  const double value = mean_term + trace_term - 2.0 * sqrt_product_trace(real.cov, gen.cov);
  if (value < -1e-6)
    throw numeric_error("fid: negative value " + std::to_string(value));
  return std::max(0.0, value);
}

double kid(const linalg::Matrix& real, const linalg::Matrix& gen, KidVariant variant) {
  if (real.cols != gen.cols)
    throw std::invalid_argument("kid: feature dimension mismatch (" +
                                std::to_string(real.cols) + " vs " +
                                std::to_string(gen.cols) + ")");
  if (real.rows < 2 || gen.rows < 2)
    throw std::invalid_argument("kid: need >= 2 samples per side");

  if (variant == KidVariant::paper_linear) {
    const auto mu_r = linalg::col_means(real);
    const auto mu_g = linalg::col_means(gen);
    double total = 0.0;
    for (std::size_t j = 0; j < mu_r.size(); ++j) {
      const double d = mu_r[j] - mu_g[j];
      total += d * d;
    }
    return total;
  }

  const auto m = static_cast<double>(real.rows);
  const auto n = static_cast<double>(gen.rows);
  const std::size_t dim = real.cols;
  const double xx = kernels::poly3_gram_sum(real.data.data(), real.rows, real.data.data(),
                                            real.rows, dim, /*skip_diagonal=*/true);
  const double yy = kernels::poly3_gram_sum(gen.data.data(), gen.rows, gen.data.data(),
                                            gen.rows, dim, /*skip_diagonal=*/true);
  const double xy = kernels::poly3_gram_sum(real.data.data(), real.rows, gen.data.data(),
                                            gen.rows, dim, /*skip_diagonal=*/false);
  return xx / (m * (m - 1.0)) + yy / (n * (n - 1.0)) - 2.0 * xy / (m * n);
}

}  // namespace hqcgan::metrics
