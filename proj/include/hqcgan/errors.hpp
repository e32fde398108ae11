#pragma once

#include <stdexcept>
#include <string>

namespace hqcgan {

// Error categories, mirrored by CLI exit codes:
//   usage_error / std::invalid_argument -> 1  (bad flags, bad config, bad call)
//   data_error                          -> 2  (missing or malformed input data)
//   numeric_error                       -> 3  (non-finite values, broken invariants)
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hqcgan
