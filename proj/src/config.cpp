#include "hqcgan/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "hqcgan/binio.hpp"
#include "hqcgan/errors.hpp"
#include "hqcgan/metrics.hpp"

namespace hqcgan::config {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& value) {
  if (value.empty()) throw usage_error("config: empty value for '" + key + "'");
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size())
    throw usage_error("config: '" + value + "' is not a number (key '" + key + "')");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-')
    throw usage_error("config: '" + value + "' is not a non-negative integer (key '" +
                      key + "')");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size())
    throw usage_error("config: '" + value + "' is not an integer (key '" + key + "')");
  return v;
}

}  // namespace

void ExperimentConfig::validate(bool check_paths) const {
  train.validate();
  metrics::Embedding::from_name(embedding);  // throws on bad names
  if (eval_samples < 2)
    throw std::invalid_argument("config: eval_samples must be >= 2, got " +
                                std::to_string(eval_samples));
  if (check_paths) {
    for (const std::string& path : {train_cache, eval_cache})
      if (!std::filesystem::exists(path))
        throw data_error("config: dataset cache '" + path +
                         "' does not exist (run prepare-data first)");
  }
}

std::string ExperimentConfig::effective_run_dir() const {
  return run_dir.empty() ? "runs/" + train.model_name() : run_dir;
}

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  out += "[model]\n";
  out += "kind = " + std::string(cfg.train.model == gan::ModelKind::classical
                                     ? "classical"
                                     : "hqcgan") + "\n";
  out += "qubits = " + std::to_string(cfg.train.n_qubits) + "\n";
  out += "latent_dim = " + std::to_string(cfg.train.latent_dim) + "\n";
  out += "\n[train]\n";
  out += "epochs = " + std::to_string(cfg.train.epochs) + "\n";
  out += "batch_size = " + std::to_string(cfg.train.batch_size) + "\n";
  out += "lr = " + format_double(cfg.train.lr) + "\n";
  out += "beta1 = " + format_double(cfg.train.beta1) + "\n";
  out += "beta2 = " + format_double(cfg.train.beta2) + "\n";
  out += "seed = " + std::to_string(cfg.train.seed) + "\n";
  out += "eval_every_samples = " + std::to_string(cfg.train.eval_every_samples) + "\n";
  out += "\n[noise]\n";
  out += "depolarizing_p = " + format_double(cfg.train.noise.depolarizing_p) + "\n";
  out += "amplitude_damping_gamma = " +
         format_double(cfg.train.noise.amplitude_damping_gamma) + "\n";
  out += "readout_p01 = " + format_double(cfg.train.noise.readout_p01) + "\n";
  out += "readout_p10 = " + format_double(cfg.train.noise.readout_p10) + "\n";
  out += "\n[data]\n";
  out += "train_cache = " + cfg.train_cache + "\n";
  out += "eval_cache = " + cfg.eval_cache + "\n";
  out += "subset_per_class = " + std::to_string(cfg.subset_per_class) + "\n";
  out += "\n[eval]\n";
  out += "embedding = " + cfg.embedding + "\n";
  out += "eval_samples = " + std::to_string(cfg.eval_samples) + "\n";
  out += "\n[output]\n";
  out += "run_dir = " + cfg.run_dir + "\n";
  return out;
}

ExperimentConfig parse(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;

  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw usage_error("config line " + std::to_string(line_no) +
                          ": malformed section header '" + line + "'");
      section = line.substr(1, line.size() - 2);
      if (section != "model" && section != "train" && section != "noise" &&
          section != "data" && section != "eval" && section != "output")
        throw usage_error("config line " + std::to_string(line_no) +
                          ": unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw usage_error("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    if (section.empty())
      throw usage_error("config line " + std::to_string(line_no) +
                        ": key before any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;
    if (!seen.insert(qualified).second)
      throw usage_error("config line " + std::to_string(line_no) + ": duplicate key '" +
                        qualified + "'");

    if (qualified == "model.kind") {
      if (value == "classical") cfg.train.model = gan::ModelKind::classical;
      else if (value == "hqcgan") cfg.train.model = gan::ModelKind::hqcgan;
      else
        throw usage_error("config: model.kind must be 'classical' or 'hqcgan', got '" +
                          value + "'");
    } else if (qualified == "model.qubits") {
      cfg.train.n_qubits = static_cast<int>(parse_u64(qualified, value));
    } else if (qualified == "model.latent_dim") {
      cfg.train.latent_dim = parse_u64(qualified, value);
    } else if (qualified == "train.epochs") {
      cfg.train.epochs = parse_u64(qualified, value);
    } else if (qualified == "train.batch_size") {
      cfg.train.batch_size = parse_u64(qualified, value);
    } else if (qualified == "train.lr") {
      cfg.train.lr = parse_double(qualified, value);
    } else if (qualified == "train.beta1") {
      cfg.train.beta1 = parse_double(qualified, value);
    } else if (qualified == "train.beta2") {
      cfg.train.beta2 = parse_double(qualified, value);
    } else if (qualified == "train.seed") {
      cfg.train.seed = parse_u64(qualified, value);
    } else if (qualified == "train.eval_every_samples") {
      cfg.train.eval_every_samples = parse_u64(qualified, value);
    } else if (qualified == "noise.depolarizing_p") {
      cfg.train.noise.depolarizing_p = parse_double(qualified, value);
    } else if (qualified == "noise.amplitude_damping_gamma") {
      cfg.train.noise.amplitude_damping_gamma = parse_double(qualified, value);
    } else if (qualified == "noise.readout_p01") {
      cfg.train.noise.readout_p01 = parse_double(qualified, value);
    } else if (qualified == "noise.readout_p10") {
      cfg.train.noise.readout_p10 = parse_double(qualified, value);
    } else if (qualified == "data.train_cache") {
      cfg.train_cache = value;
    } else if (qualified == "data.eval_cache") {
      cfg.eval_cache = value;
    } else if (qualified == "data.subset_per_class") {
      cfg.subset_per_class = parse_u64(qualified, value);
    } else if (qualified == "eval.embedding") {
      cfg.embedding = value;
    } else if (qualified == "eval.eval_samples") {
      cfg.eval_samples = parse_u64(qualified, value);
    } else if (qualified == "output.run_dir") {
      cfg.run_dir = value;
    } else {
      throw usage_error("config line " + std::to_string(line_no) + ": unknown key '" +
                        key + "' in section [" + section + "]");
    }
  }
  return cfg;
}

ExperimentConfig load(const std::string& path) {
  const auto bytes = binio::read_file(path);
  return parse(std::string(bytes.begin(), bytes.end()));
}

void save(const ExperimentConfig& cfg, const std::string& path) {
  binio::write_file(path, serialize(cfg));
}

}  // namespace hqcgan::config
