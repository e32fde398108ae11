#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hqcgan/linalg.hpp"

// Distribution distances between real and generated image batches, computed
// over a pluggable feature embedding:
//   fid = ||mu_r - mu_g||^2 + Tr(S_r + S_g - 2 (S_r S_g)^{1/2})
//   kid (paper_linear)  = ||mean phi(real) - mean phi(gen)||^2
//   kid (poly_mmd)      = unbiased MMD^2 with k(a, b) = (a.b / d + 1)^3
// paper_linear is the literal squared-mean-difference reading of the KID
// formula; poly_mmd is the standard polynomial-kernel estimator. Both are
// reported side by side.
namespace hqcgan::metrics {

class Embedding {
 public:
  enum class Kind { raw_pixels, pca, random_projection };

  // Identity features (dim 784).
  static Embedding raw_pixels();
  // Top-k principal components of the real feature set; fit() required.
  static Embedding pca(std::size_t k);
  // Fixed seeded Gaussian projection, scaled by 1/sqrt(k); no fitting.
  static Embedding random_projection(std::size_t k, std::uint64_t seed);

  // Parses "raw", "pca<k>" or "rp<k>" (e.g. "pca64").
  static Embedding from_name(const std::string& name);

  // Centers on the real data mean and extracts principal components
  // (pca only; other kinds ignore the call). Fitting twice is rejected.
  void fit(const linalg::Matrix& real_features);
  bool needs_fit() const;

  // batch x 784 -> batch x output_dim. pca before fit() is an error.
  linalg::Matrix embed(const linalg::Matrix& batch) const;

  Kind kind() const { return kind_; }
  std::size_t output_dim() const;
  const std::string& name() const { return name_; }

 private:
  Embedding(Kind kind, std::size_t k, std::string name);

  Kind kind_;
  std::size_t k_;
  std::string name_;
  bool fitted_ = false;
  std::vector<double> mean_;   // pca: training mean
  linalg::Matrix basis_;       // k x input_dim
};

struct GaussianSummary {
  std::vector<double> mean;
  linalg::Matrix cov;  // unbiased, divides by m - 1
  std::size_t sample_count = 0;
};

// Feature matrix (m x k, m >= 2) -> mean and unbiased covariance.
GaussianSummary gaussian_summary(const linalg::Matrix& features);

// Tr((S_r S_g)^{1/2}) via symmetric eigendecompositions. Eigenvalues below
// -1e-6 raise numeric_error; small negative dust is clamped to zero.
double sqrt_product_trace(const linalg::Matrix& s_r, const linalg::Matrix& s_g);

// Frechet distance between the two Gaussian summaries. A result below -1e-6
// raises numeric_error; tiny negative dust clamps to zero.
double fid(const GaussianSummary& real, const GaussianSummary& gen);

enum class KidVariant { paper_linear, poly_mmd };

// real/gen are embedded feature matrices with matching dim, >= 2 rows each.
double kid(const linalg::Matrix& real, const linalg::Matrix& gen, KidVariant variant);

// One metrics log row as written to metrics.csv.
struct MetricRow {
  std::uint64_t samples_seen = 0;
  std::string embedding;
  double fid = 0.0;
  double kid_linear = 0.0;
  double kid_poly = 0.0;
};

}  // namespace hqcgan::metrics
