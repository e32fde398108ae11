#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hqcgan/errors.hpp"

// Byte-order-explicit binary readers/writers shared by the dataset cache,
// network checkpoints (little-endian) and IDX files (big-endian).
namespace hqcgan::binio {

inline void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64_le(std::ostream& out, std::uint64_t v) {
  write_u32_le(out, static_cast<std::uint32_t>(v & 0xffffffffULL));
  write_u32_le(out, static_cast<std::uint32_t>(v >> 32));
}

inline void write_f64_le(std::ostream& out, double v) {
  write_u64_le(out, std::bit_cast<std::uint64_t>(v));
}

inline void write_f32_le(std::ostream& out, float v) {
  write_u32_le(out, std::bit_cast<std::uint32_t>(v));
}

inline void write_u32_be(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>((v >> 24) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>(v & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

// Reader over an in-memory buffer with bounds checks; throws data_error with
// the stream name on truncation.
class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  std::size_t size() const { return bytes_.size(); }
  std::size_t offset() const { return off_; }
  std::size_t remaining() const { return bytes_.size() - off_; }

  const unsigned char* take(std::size_t n) {
    if (remaining() < n) {
      throw data_error("truncated file: " + name_ + " (needed " +
                       std::to_string(n) + " bytes at offset " +
                       std::to_string(off_) + ", have " +
                       std::to_string(remaining()) + ")");
    }
    const unsigned char* p = bytes_.data() + off_;
    off_ += n;
    return p;
  }

  std::uint32_t read_u32_be() {
    const unsigned char* p = take(4);
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  }

  std::uint32_t read_u32_le() {
    const unsigned char* p = take(4);
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
           (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  }

  std::uint64_t read_u64_le() {
    std::uint64_t lo = read_u32_le();
    std::uint64_t hi = read_u32_le();
    return lo | (hi << 32);
  }

  double read_f64_le() { return std::bit_cast<double>(read_u64_le()); }
  float read_f32_le() { return std::bit_cast<float>(read_u32_le()); }

  const std::string& name() const { return name_; }

 private:
  std::vector<unsigned char> bytes_;
  std::string name_;
  std::size_t off_ = 0;
};

// Slurps a file; throws data_error naming the path when it cannot be opened.
std::vector<unsigned char> read_file(const std::string& path);

// Writes bytes, throws data_error on failure.
void write_file(const std::string& path, const std::string& bytes);

}  // namespace hqcgan::binio
