#pragma once

#include <string>

#include "hqcgan/gan.hpp"

// Experiment configuration: the training setup plus dataset paths, evaluation
// choices and the output directory, serialized as a strict sectioned
// key = value file. Unknown sections, unknown keys, duplicate keys and
// malformed values are all hard errors, and the canonical serialization
// round-trips bit-exactly so a run's config snapshot reproduces the run.
namespace hqcgan::config {

struct ExperimentConfig {
  gan::TrainConfig train;

  std::string train_cache = "data/train_cache.bin";
  std::string eval_cache = "data/eval_cache.bin";
  std::size_t subset_per_class = 0;  // 0 = use the full cache

  std::string embedding = "pca64";   // raw | pca<k> | rp<k>
  std::size_t eval_samples = 2000;   // generated and real rows per evaluation

  std::string run_dir;  // empty = runs/<model_name>

  // Training invariants plus embedding-name syntax and eval_samples >= 2.
  // With check_paths, the dataset caches must exist (data_error otherwise).
  void validate(bool check_paths) const;

  std::string effective_run_dir() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Canonical INI text (fixed section/key order; shortest round-trip floats).
std::string serialize(const ExperimentConfig& cfg);

// Strict parse; usage_error with the offending line/key on any violation.
ExperimentConfig parse(const std::string& text);

ExperimentConfig load(const std::string& path);    // data_error if unreadable
void save(const ExperimentConfig& cfg, const std::string& path);

}  // namespace hqcgan::config
