#include "hqcgan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hqcgan/binio.hpp"
#include "hqcgan/errors.hpp"
#include "hqcgan/rng.hpp"

namespace hqcgan::dataset {

namespace {

constexpr std::uint32_t kImagesMagic = 2051;
constexpr std::uint32_t kLabelsMagic = 2049;
constexpr char kCacheMagic[4] = {'H', 'Q', 'C', 'D'};
constexpr std::uint32_t kCacheVersion = 1;

void shuffle_indices(std::vector<std::size_t>& idx, rng::Stream& stream) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = stream.next_index(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

// Seeded selection of `take` indices out of `pool`, returned in ascending
// order so the surviving records keep their original file order.
std::vector<std::size_t> pick(const std::vector<std::size_t>& pool, std::size_t take,
                              rng::Stream& stream) {
  std::vector<std::size_t> shuffled = pool;
  shuffle_indices(shuffled, stream);
  shuffled.resize(take);
  std::sort(shuffled.begin(), shuffled.end());
  return shuffled;
}

}  // namespace

RawData parse_idx(const std::string& images_path, const std::string& labels_path) {
  binio::Reader images(binio::read_file(images_path), images_path);
  binio::Reader labels(binio::read_file(labels_path), labels_path);

  const std::uint32_t imagic = images.read_u32_be();
  if (imagic != kImagesMagic)
    throw data_error("bad magic in " + images_path + ": got " + std::to_string(imagic) +
                     ", expected " + std::to_string(kImagesMagic));
  const std::uint32_t icount = images.read_u32_be();
  const std::uint32_t rows = images.read_u32_be();
  const std::uint32_t cols = images.read_u32_be();
  if (rows != kImageSide || cols != kImageSide)
    throw data_error("unsupported image size in " + images_path + ": " +
                     std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                     std::to_string(kImageSide) + "x" + std::to_string(kImageSide));

  const std::uint32_t lmagic = labels.read_u32_be();
  if (lmagic != kLabelsMagic)
    throw data_error("bad magic in " + labels_path + ": got " + std::to_string(lmagic) +
                     ", expected " + std::to_string(kLabelsMagic));
  const std::uint32_t lcount = labels.read_u32_be();
  if (icount != lcount)
    throw data_error("record count mismatch: " + images_path + " has " +
                     std::to_string(icount) + " images but " + labels_path + " has " +
                     std::to_string(lcount) + " labels");

  RawData raw;
  raw.count = icount;
  raw.rows = static_cast<int>(rows);
  raw.cols = static_cast<int>(cols);
  const std::size_t n_pixels = raw.count * kImageDim;
  const unsigned char* px = images.take(n_pixels);
  raw.pixels.assign(px, px + n_pixels);
  const unsigned char* lb = labels.take(raw.count);
  raw.labels.assign(lb, lb + raw.count);

  if (images.remaining() != 0)
    throw data_error("trailing bytes in " + images_path + ": " +
                     std::to_string(images.remaining()) + " after the last record");
  if (labels.remaining() != 0)
    throw data_error("trailing bytes in " + labels_path + ": " +
                     std::to_string(labels.remaining()) + " after the last record");
  for (std::uint8_t l : raw.labels)
    if (l > 9)
      throw data_error("label out of range in " + labels_path + ": " + std::to_string(l));
  return raw;
}

double normalize_pixel(int value) {
  if (value < 0 || value > 255)
    throw std::invalid_argument("normalize_pixel: value " + std::to_string(value) +
                                " outside [0, 255]");
  return static_cast<double>(value) / 255.0 * 2.0 - 1.0;
}

double denormalize_pixel(double x) { return (x + 1.0) / 2.0 * 255.0; }

BalancedDataset filter_and_balance(const RawData& raw, std::uint64_t seed) {
  std::vector<std::size_t> zeros, ones;
  for (std::size_t i = 0; i < raw.count; ++i) {
    if (raw.labels[i] == 0) zeros.push_back(i);
    if (raw.labels[i] == 1) ones.push_back(i);
  }
  if (zeros.empty() || ones.empty())
    throw data_error("filter_and_balance: class " + std::string(zeros.empty() ? "0" : "1") +
                     " has no samples");

  const std::size_t per_class = std::min(zeros.size(), ones.size());
  rng::Stream stream(rng::derive_seed(seed, "balance"));
  // The minority class is kept whole; only the majority class is shuffled and
  // truncated, so no index is ever repeated.
  std::vector<std::size_t> kept0 =
      zeros.size() == per_class ? zeros : pick(zeros, per_class, stream);
  std::vector<std::size_t> kept1 =
      ones.size() == per_class ? ones : pick(ones, per_class, stream);

  std::vector<std::size_t> merged;
  merged.reserve(kept0.size() + kept1.size());
  merged.insert(merged.end(), kept0.begin(), kept0.end());
  merged.insert(merged.end(), kept1.begin(), kept1.end());
  std::sort(merged.begin(), merged.end());

  BalancedDataset ds;
  ds.pixels.resize(merged.size() * kImageDim);
  ds.labels.resize(merged.size());
  for (std::size_t r = 0; r < merged.size(); ++r) {
    const std::size_t src = merged[r];
    ds.labels[r] = raw.labels[src];
    for (std::size_t j = 0; j < kImageDim; ++j)
      ds.pixels[r * kImageDim + j] =
          static_cast<float>(normalize_pixel(raw.pixels[src * kImageDim + j]));
  }
  ds.class_counts = {per_class, per_class};
  return ds;
}

BalancedDataset subset(const BalancedDataset& ds, std::size_t per_class,
                       std::uint64_t seed) {
  if (per_class == 0) return ds;
  if (per_class > ds.class_counts[0] || per_class > ds.class_counts[1])
    throw data_error("subset: requested " + std::to_string(per_class) +
                     " per class, have " + std::to_string(ds.class_counts[0]) + "/" +
                     std::to_string(ds.class_counts[1]));
  std::vector<std::size_t> zeros, ones;
  for (std::size_t i = 0; i < ds.count(); ++i)
    (ds.labels[i] == 0 ? zeros : ones).push_back(i);
  rng::Stream stream(rng::derive_seed(seed, "subset"));
  std::vector<std::size_t> merged = pick(zeros, per_class, stream);
  std::vector<std::size_t> kept1 = pick(ones, per_class, stream);
  merged.insert(merged.end(), kept1.begin(), kept1.end());
  std::sort(merged.begin(), merged.end());

  BalancedDataset out;
  out.pixels.resize(merged.size() * kImageDim);
  out.labels.resize(merged.size());
  for (std::size_t r = 0; r < merged.size(); ++r) {
    out.labels[r] = ds.labels[merged[r]];
    std::copy_n(ds.pixels.begin() + static_cast<std::ptrdiff_t>(merged[r] * kImageDim),
                kImageDim, out.pixels.begin() + static_cast<std::ptrdiff_t>(r * kImageDim));
  }
  out.class_counts = {per_class, per_class};
  return out;
}

BatchStream::BatchStream(const BalancedDataset& ds, std::size_t batch_size,
                         std::uint64_t seed)
    : ds_(&ds), batch_size_(batch_size), seed_(seed) {
  if (batch_size == 0 || batch_size > ds.count())
    throw std::invalid_argument("BatchStream: batch_size " + std::to_string(batch_size) +
                                " invalid for " + std::to_string(ds.count()) + " records");
  begin_epoch(0);
}

void BatchStream::begin_epoch(std::uint64_t epoch) {
  perm_.resize(ds_->count());
  for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = i;
  rng::Stream stream(rng::derive_seed(seed_, "epoch", epoch));
  shuffle_indices(perm_, stream);
  cursor_ = 0;
}

bool BatchStream::next(linalg::Matrix& out) {
  if (cursor_ + batch_size_ > perm_.size()) return false;  // drop partial batch
  if (out.rows != batch_size_ || out.cols != kImageDim)
    out = linalg::Matrix(batch_size_, kImageDim);
  for (std::size_t r = 0; r < batch_size_; ++r) {
    const float* src = ds_->pixels.data() + perm_[cursor_ + r] * kImageDim;
    double* dst = out.row(r);
    for (std::size_t j = 0; j < kImageDim; ++j) dst[j] = static_cast<double>(src[j]);
  }
  cursor_ += batch_size_;
  return true;
}

void write_cache(const std::string& path, const BalancedDataset& ds) {
  std::ostringstream out(std::ios::binary);
  out.write(kCacheMagic, 4);
  binio::write_u32_le(out, kCacheVersion);
  binio::write_u64_le(out, ds.count());
  binio::write_u32_le(out, static_cast<std::uint32_t>(kImageDim));
  out.write(reinterpret_cast<const char*>(ds.labels.data()),
            static_cast<std::streamsize>(ds.labels.size()));
  for (float v : ds.pixels) binio::write_f32_le(out, v);
  binio::write_file(path, out.str());
}

BalancedDataset read_cache(const std::string& path) {
  binio::Reader in(binio::read_file(path), path);
  const unsigned char* magic = in.take(4);
  if (!std::equal(magic, magic + 4, kCacheMagic))
    throw data_error("bad cache magic in " + path);
  const std::uint32_t version = in.read_u32_le();
  if (version != kCacheVersion)
    throw data_error("unsupported cache version " + std::to_string(version) + " in " +
                     path);
  const std::uint64_t count = in.read_u64_le();
  const std::uint32_t dim = in.read_u32_le();
  if (dim != kImageDim)
    throw data_error("unexpected record dim " + std::to_string(dim) + " in " + path);

  BalancedDataset ds;
  ds.labels.resize(count);
  const unsigned char* lb = in.take(count);
  std::copy(lb, lb + count, ds.labels.begin());
  ds.pixels.resize(count * kImageDim);
  for (float& v : ds.pixels) v = in.read_f32_le();
  if (in.remaining() != 0)
    throw data_error("trailing bytes in cache " + path);
  for (std::uint8_t l : ds.labels) {
    if (l > 1) throw data_error("cache " + path + " holds a non-binary label");
    ++ds.class_counts[l];
  }
  return ds;
}

namespace {

// Renders one glyph into a 28x28 byte grid. Zeros are jittered ellipse rings,
// ones are jittered near-vertical strokes; both get a soft intensity falloff.
void render_glyph(std::uint8_t* img, int label, rng::Stream& stream) {
  const double cx = 13.5 + 2.0 * (stream.next_uniform() - 0.5) * 2.0;
  const double cy = 13.5 + 1.5 * (stream.next_uniform() - 0.5) * 2.0;
  const double bright = 0.75 + 0.25 * stream.next_uniform();
  const double thick = 1.6 + 0.9 * stream.next_uniform();

  if (label == 0) {
    const double rx = 5.5 + 2.5 * stream.next_uniform();
    const double ry = 7.5 + 2.5 * stream.next_uniform();
    for (int r = 0; r < kImageSide; ++r)
      for (int c = 0; c < kImageSide; ++c) {
        const double dx = (c - cx) / rx;
        const double dy = (r - cy) / ry;
        const double d = std::abs(std::sqrt(dx * dx + dy * dy) - 1.0) *
                         std::min(rx, ry);
        const double v = std::max(0.0, 1.0 - d / thick);
        img[r * kImageSide + c] =
            static_cast<std::uint8_t>(std::min(255.0, 255.0 * bright * v));
      }
  } else {
    const double slant = (stream.next_uniform() - 0.5) * 4.0;
    const double top = 3.0 + 2.0 * stream.next_uniform();
    const double bottom = 23.0 + 2.0 * stream.next_uniform();
    for (int r = 0; r < kImageSide; ++r)
      for (int c = 0; c < kImageSide; ++c) {
        if (r < top || r > bottom) {
          img[r * kImageSide + c] = 0;
          continue;
        }
        const double t = (r - top) / std::max(1.0, bottom - top);
        const double x = cx + slant * (t - 0.5) * 2.0;
        const double d = std::abs(c - x);
        const double v = std::max(0.0, 1.0 - d / thick);
        img[r * kImageSide + c] =
            static_cast<std::uint8_t>(std::min(255.0, 255.0 * bright * v));
      }
  }
}

}  // namespace

RawData synthesize_digits(std::size_t n_zeros, std::size_t n_ones, std::uint64_t seed) {
  if (n_zeros == 0 && n_ones == 0)
    throw std::invalid_argument("synthesize_digits: nothing to generate");
  RawData raw;
  raw.count = n_zeros + n_ones;
  raw.rows = kImageSide;
  raw.cols = kImageSide;
  raw.pixels.resize(raw.count * kImageDim);
  raw.labels.resize(raw.count);

  // Class layout is shuffled so the files do not arrive sorted by label.
  std::vector<std::size_t> order(raw.count);
  for (std::size_t i = 0; i < raw.count; ++i) order[i] = i;
  rng::Stream layout(rng::derive_seed(seed, "layout"));
  shuffle_indices(order, layout);

  rng::Stream glyphs(rng::derive_seed(seed, "glyphs"));
  for (std::size_t i = 0; i < raw.count; ++i) {
    const int label = order[i] < n_zeros ? 0 : 1;
    raw.labels[i] = static_cast<std::uint8_t>(label);
    render_glyph(raw.pixels.data() + i * kImageDim, label, glyphs);
  }
  return raw;
}

void write_idx(const RawData& raw, const std::string& images_path,
               const std::string& labels_path) {
  std::ostringstream images(std::ios::binary);
  binio::write_u32_be(images, kImagesMagic);
  binio::write_u32_be(images, static_cast<std::uint32_t>(raw.count));
  binio::write_u32_be(images, static_cast<std::uint32_t>(raw.rows));
  binio::write_u32_be(images, static_cast<std::uint32_t>(raw.cols));
  images.write(reinterpret_cast<const char*>(raw.pixels.data()),
               static_cast<std::streamsize>(raw.pixels.size()));
  binio::write_file(images_path, images.str());

  std::ostringstream labels(std::ios::binary);
  binio::write_u32_be(labels, kLabelsMagic);
  binio::write_u32_be(labels, static_cast<std::uint32_t>(raw.count));
  labels.write(reinterpret_cast<const char*>(raw.labels.data()),
               static_cast<std::streamsize>(raw.labels.size()));
  binio::write_file(labels_path, labels.str());
}

}  // namespace hqcgan::dataset
