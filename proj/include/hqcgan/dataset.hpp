#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hqcgan/linalg.hpp"

// Binary-digit image pipeline: IDX files -> filter to labels {0, 1} ->
// undersample the majority class to balance -> normalize pixels to [-1, 1]
// (x / 255 * 2 - 1) -> shuffled fixed-size batches. A flat binary cache file
// stores the prepared dataset so training never re-parses IDX.
namespace hqcgan::dataset {

inline constexpr int kImageSide = 28;
inline constexpr std::size_t kImageDim = 784;

struct RawData {
  std::size_t count = 0;
  int rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
  std::vector<std::uint8_t> labels;  // count
};

// Reads an IDX image/label file pair. Validates magic numbers (2051 / 2049),
// dimensions and record counts; throws data_error naming the offending file.
RawData parse_idx(const std::string& images_path, const std::string& labels_path);

// Pixel value 0..255 -> [-1, 1].
double normalize_pixel(int value);
// Inverse map back to the 0..255 range (real-valued; clamp + round at 1e-?).
double denormalize_pixel(double x);

struct BalancedDataset {
  std::vector<float> pixels;          // count x 784 row-major, already in [-1, 1]
  std::vector<std::uint8_t> labels;   // 0 or 1
  std::array<std::size_t, 2> class_counts = {0, 0};
  std::size_t count() const { return labels.size(); }
};

// Keeps labels {0, 1} only, undersamples the majority class with a seeded
// shuffle (no index is ever used twice) and normalizes pixels. An empty class
// raises data_error.
BalancedDataset filter_and_balance(const RawData& raw, std::uint64_t seed);

// Seeded balanced sub-selection of per_class images per class; per_class = 0
// returns the dataset unchanged.
BalancedDataset subset(const BalancedDataset& ds, std::size_t per_class,
                       std::uint64_t seed);

// Seeded epoch shuffles over a balanced dataset; the final partial batch of
// each epoch is dropped so every batch has exactly batch_size rows. Epoch e
// uses a permutation derived from (seed, e), so streams replay exactly.
class BatchStream {
 public:
  BatchStream(const BalancedDataset& ds, std::size_t batch_size, std::uint64_t seed);

  std::size_t batches_per_epoch() const { return ds_->count() / batch_size_; }
  std::size_t batch_size() const { return batch_size_; }

  // Starts (or restarts) an epoch: reshuffles with the epoch-specific stream.
  void begin_epoch(std::uint64_t epoch);

  // Fills `out` (batch_size x 784) with the next batch; false when the epoch
  // is exhausted.
  bool next(linalg::Matrix& out);

 private:
  const BalancedDataset* ds_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::vector<std::size_t> perm_;
  std::size_t cursor_ = 0;
};

// Flat binary cache (little-endian): magic "HQCD", u32 version, u64 count,
// u32 dim, labels as bytes, then count*dim float32 pixels.
void write_cache(const std::string& path, const BalancedDataset& ds);
BalancedDataset read_cache(const std::string& path);

// Synthetic stand-in corpus with the IDX layout: blob-like "0" glyphs and
// stroke-like "1" glyphs with seeded jitter, so the full pipeline runs in
// environments without the real handwritten-digit files.
RawData synthesize_digits(std::size_t n_zeros, std::size_t n_ones, std::uint64_t seed);

// Writes a RawData as a standard IDX image/label file pair.
void write_idx(const RawData& raw, const std::string& images_path,
               const std::string& labels_path);

}  // namespace hqcgan::dataset
