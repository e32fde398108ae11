#include "hqcgan/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hqcgan/binio.hpp"
#include "hqcgan/config.hpp"
#include "hqcgan/errors.hpp"
#include "hqcgan/gan.hpp"
#include "hqcgan/metrics.hpp"
#include "hqcgan/rng.hpp"
#include "hqcgan/viz.hpp"

namespace hqcgan::cli {
namespace {

namespace fs = std::filesystem;
using linalg::Matrix;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string data_dir_default() {
  const char* env = std::getenv("HQCGAN_DATA_DIR");
  return (env && *env) ? std::string(env) : std::string("data");
}

// The built-in cache defaults live under "data/"; when HQCGAN_DATA_DIR is set
// it replaces that prefix unless the config or a flag chose explicit paths.
void apply_data_dir_env(config::ExperimentConfig& cfg) {
  const char* env = std::getenv("HQCGAN_DATA_DIR");
  if (!env || !*env) return;
  const std::string dir(env);
  if (cfg.train_cache == "data/train_cache.bin")
    cfg.train_cache = dir + "/train_cache.bin";
  if (cfg.eval_cache == "data/eval_cache.bin")
    cfg.eval_cache = dir + "/eval_cache.bin";
}

Matrix pixels_to_matrix(const dataset::BalancedDataset& ds) {
  Matrix m(ds.count(), dataset::kImageDim);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = static_cast<double>(ds.pixels[i]);
  return m;
}

// Generated images (rows in [-1, 1]) from a generator checkpoint. Evaluation
// draws go to a scratch ledger so they never count as training shots.
Matrix generate_images(const nnet::DenseNet& g, const gan::TrainConfig& tc,
                       std::size_t count, std::uint64_t seed) {
  latent::ShotLedger scratch;
  latent::LatentBatch z;
  if (tc.is_quantum()) {
    const latent::QuantumSource source(qsim::CircuitSpec{tc.n_qubits}, tc.noise);
    z = source.sample(count, seed, scratch);
  } else {
    z = latent::sample_gaussian_batch(tc.latent_dim, count, seed);
  }
  return nnet::forward(g, z.vectors).output();
}

struct MetricRow {
  double fid = 0.0, kid_linear = 0.0, kid_poly = 0.0;
};

// Frozen real-side state for FID/KID: the balanced real sample, the fitted
// embedding, its features and their Gaussian summary.
struct MetricsEvaluator {
  metrics::Embedding embedding = metrics::Embedding::raw_pixels();
  Matrix real_features;
  metrics::GaussianSummary real_summary;
  std::size_t rows = 0;

  static MetricsEvaluator build(const std::string& embedding_name,
                                const dataset::BalancedDataset& eval_ds,
                                std::size_t eval_samples, std::uint64_t seed) {
    MetricsEvaluator ev;
    ev.embedding = metrics::Embedding::from_name(embedding_name);
    const auto sub =
        dataset::subset(eval_ds, eval_samples / 2, rng::derive_seed(seed, "eval-real"));
    const Matrix real = pixels_to_matrix(sub);
    if (ev.embedding.needs_fit()) ev.embedding.fit(real);
    ev.real_features = ev.embedding.embed(real);
    ev.real_summary = metrics::gaussian_summary(ev.real_features);
    ev.rows = real.rows;
    return ev;
  }

  MetricRow score(const Matrix& generated) const {
    const Matrix features = embedding.embed(generated);
    const auto summary = metrics::gaussian_summary(features);
    MetricRow row;
    row.fid = metrics::fid(real_summary, summary);
    row.kid_linear = metrics::kid(real_features, features, metrics::KidVariant::paper_linear);
    row.kid_poly = metrics::kid(real_features, features, metrics::KidVariant::poly_mmd);
    return row;
  }
};

constexpr const char* kMetricsHeader = "samples_seen,embedding,fid,kid_linear,kid_poly";

std::string format_metric_row(std::uint64_t samples_seen, const std::string& embedding,
                              const MetricRow& row) {
  return std::to_string(samples_seen) + "," + embedding + "," + fmt17(row.fid) + "," +
         fmt17(row.kid_linear) + "," + fmt17(row.kid_poly);
}

std::vector<std::string> read_lines(const std::string& path) {
  const auto bytes = binio::read_file(path);
  std::vector<std::string> lines;
  std::string current;
  for (unsigned char c : bytes) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current += static_cast<char>(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    if (end == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

double parse_csv_double(const std::string& field, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size())
    throw data_error(path + ": malformed numeric field '" + field + "'");
  return v;
}

// ---------------------------------------------------------------------------
// prepare-data

struct PrepareArgs {
  std::string data_dir;
  std::string train_images, train_labels, test_images, test_labels;
  std::string out_train, out_eval;
  std::uint64_t seed = 1;
  bool force = false;
  bool synthesize = false;
  std::uint64_t synth_train_zeros = 5923, synth_train_ones = 6742;
  std::uint64_t synth_test_zeros = 2500, synth_test_ones = 2500;
};

void cmd_prepare_data(PrepareArgs args) {
  if (args.data_dir.empty()) args.data_dir = data_dir_default();
  auto defaulted = [&](std::string& field, const char* name) {
    if (field.empty()) field = args.data_dir + "/" + name;
  };
  defaulted(args.train_images, "train-images-idx3-ubyte");
  defaulted(args.train_labels, "train-labels-idx1-ubyte");
  defaulted(args.test_images, "t10k-images-idx3-ubyte");
  defaulted(args.test_labels, "t10k-labels-idx1-ubyte");
  defaulted(args.out_train, "train_cache.bin");
  defaulted(args.out_eval, "eval_cache.bin");

  if (!args.force && fs::exists(args.out_train) && fs::exists(args.out_eval)) {
    std::cout << "caches already present (" << args.out_train << ", " << args.out_eval
              << "); nothing to do — pass --force to rebuild\n";
    return;
  }
  fs::create_directories(args.data_dir);

  if (args.synthesize) {
    if (!fs::exists(args.train_images) || !fs::exists(args.train_labels)) {
      const auto raw = dataset::synthesize_digits(
          args.synth_train_zeros, args.synth_train_ones,
          rng::derive_seed(args.seed, "synth-train"));
      dataset::write_idx(raw, args.train_images, args.train_labels);
      std::cout << "synthesized training corpus: " << args.synth_train_zeros
                << " zeros, " << args.synth_train_ones << " ones -> "
                << args.train_images << "\n";
    }
    if (!fs::exists(args.test_images) || !fs::exists(args.test_labels)) {
      const auto raw = dataset::synthesize_digits(
          args.synth_test_zeros, args.synth_test_ones,
          rng::derive_seed(args.seed, "synth-test"));
      dataset::write_idx(raw, args.test_images, args.test_labels);
      std::cout << "synthesized evaluation corpus: " << args.synth_test_zeros
                << " zeros, " << args.synth_test_ones << " ones -> "
                << args.test_images << "\n";
    }
  }

  const auto train_raw = dataset::parse_idx(args.train_images, args.train_labels);
  const auto train_ds =
      dataset::filter_and_balance(train_raw, rng::derive_seed(args.seed, "train-balance"));
  dataset::write_cache(args.out_train, train_ds);
  std::cout << "train cache: " << train_ds.class_counts[0] << " / "
            << train_ds.class_counts[1] << " (" << train_ds.count() << " images) -> "
            << args.out_train << "\n";

  const auto eval_raw = dataset::parse_idx(args.test_images, args.test_labels);
  const auto eval_ds =
      dataset::filter_and_balance(eval_raw, rng::derive_seed(args.seed, "eval-balance"));
  dataset::write_cache(args.out_eval, eval_ds);
  std::cout << "eval cache: " << eval_ds.class_counts[0] << " / "
            << eval_ds.class_counts[1] << " (" << eval_ds.count() << " images) -> "
            << args.out_eval << "\n";
}

// ---------------------------------------------------------------------------
// train

void cmd_train(const config::ExperimentConfig& cfg, bool force) {
  cfg.validate(true);
  const std::string run_dir = cfg.effective_run_dir();
  if (!force && fs::exists(fs::path(run_dir) / "train.csv"))
    throw data_error("run directory '" + run_dir +
                     "' already contains a run (pass --force to overwrite)");
  fs::create_directories(run_dir);
  config::save(cfg, run_dir + "/config.ini");

  const auto train_full = dataset::read_cache(cfg.train_cache);
  const auto train_ds = dataset::subset(
      train_full, cfg.subset_per_class, rng::derive_seed(cfg.train.seed, "subset"));
  const auto eval_ds = dataset::read_cache(cfg.eval_cache);
  const auto evaluator =
      MetricsEvaluator::build(cfg.embedding, eval_ds, cfg.eval_samples, cfg.train.seed);

  std::ofstream metrics_csv(run_dir + "/metrics.csv", std::ios::trunc);
  if (!metrics_csv)
    throw data_error("train: cannot open " + run_dir + "/metrics.csv for writing");
  metrics_csv << kMetricsHeader << "\n";
  metrics_csv.flush();

  std::cout << "training " << cfg.train.model_name() << ": " << train_ds.count()
            << " images, " << cfg.train.epochs << " epochs, batch "
            << cfg.train.batch_size << ", seed " << cfg.train.seed << "\n";

  std::size_t last_logged_epoch = 0;
  const gan::EvalHook hook = [&](const gan::EvalContext& ctx) {
    const Matrix generated =
        generate_images(ctx.generator, cfg.train, evaluator.rows,
                        rng::derive_seed(cfg.train.seed, "eval", ctx.samples_seen));
    const MetricRow row = evaluator.score(generated);
    metrics_csv << format_metric_row(ctx.samples_seen, cfg.embedding, row) << "\n";
    metrics_csv.flush();
    std::cout << "  eval @ " << ctx.samples_seen << " samples: fid=" << row.fid
              << " kid_linear=" << row.kid_linear << " kid_poly=" << row.kid_poly
              << "\n";
  };

  const auto result = gan::train(cfg.train, train_ds, run_dir, hook);

  for (const auto& log_row : result.log)
    if (log_row.epoch != last_logged_epoch) {
      last_logged_epoch = log_row.epoch;
      std::cout << "  epoch " << log_row.epoch << "/" << cfg.train.epochs
                << ": loss_d=" << log_row.loss_d << " loss_g=" << log_row.loss_g
                << "\n";
    }

  // Full-epoch wall seconds: the last row of each epoch covers the whole epoch.
  std::map<std::size_t, double> epoch_wall;
  for (const auto& log_row : result.log)
    epoch_wall[log_row.epoch] = log_row.wall_seconds_epoch;
  double wall_mean = 0.0;
  if (!epoch_wall.empty()) {
    for (const auto& [epoch, wall] : epoch_wall) wall_mean += wall;
    wall_mean /= static_cast<double>(epoch_wall.size());
  }

  nlohmann::json summary;
  summary["model"] = cfg.train.model_name();
  summary["qubits"] = cfg.train.n_qubits;
  summary["latent_dim"] = cfg.train.latent_dim;
  summary["epochs"] = cfg.train.epochs;
  summary["batch_size"] = cfg.train.batch_size;
  summary["batches_per_epoch"] = train_ds.count() / cfg.train.batch_size;
  summary["samples_seen"] = result.samples_seen;
  summary["shots_total"] = result.shots_total;
  summary["shots_if_latents_reused"] = result.shots_if_latents_reused;
  summary["wall_seconds_total"] = result.wall_seconds_total;
  summary["wall_seconds_per_epoch_mean"] = wall_mean;
  summary["final_loss_d"] = result.log.empty() ? 0.0 : result.log.back().loss_d;
  summary["final_loss_g"] = result.log.empty() ? 0.0 : result.log.back().loss_g;
  summary["embedding"] = cfg.embedding;
  summary["eval_samples"] = cfg.eval_samples;
  summary["seed"] = cfg.train.seed;
  summary["parameters_g"] = result.generator.parameter_count();
  summary["parameters_d"] = result.discriminator.parameter_count();
  binio::write_file(run_dir + "/summary.json", summary.dump(2) + "\n");

  std::cout << "run complete: " << result.samples_seen << " samples seen, "
            << result.shots_total << " quantum shots, results in " << run_dir << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string run_dir;
  std::string checkpoint;   // empty = newest generator checkpoint in run_dir
  std::string embedding;    // empty = run config's choice
  std::string eval_cache;   // empty = run config's choice
  std::uint64_t eval_samples = 0;  // 0 = run config's choice
  std::uint64_t seed = 0;          // 0 = run config's seed
  bool self_test = false;
};

std::uint64_t samples_from_checkpoint_name(const std::string& path) {
  const std::string name = fs::path(path).filename().string();
  const std::size_t underscore = name.rfind('_');
  const std::size_t dot = name.rfind(".bin");
  if (underscore == std::string::npos || dot == std::string::npos || dot <= underscore + 1)
    throw usage_error("evaluate: cannot parse samples_seen from checkpoint name '" +
                      name + "' (expected g_<model>_<samples>.bin)");
  const std::string digits = name.substr(underscore + 1, dot - underscore - 1);
  if (digits.find_first_not_of("0123456789") != std::string::npos)
    throw usage_error("evaluate: cannot parse samples_seen from checkpoint name '" +
                      name + "'");
  return std::strtoull(digits.c_str(), nullptr, 10);
}

std::string newest_generator_checkpoint(const std::string& run_dir) {
  std::string best;
  std::uint64_t best_samples = 0;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("g_", 0) != 0 || name.find(".bin") == std::string::npos) continue;
    const std::uint64_t samples = samples_from_checkpoint_name(name);
    if (best.empty() || samples >= best_samples) {
      best = entry.path().string();
      best_samples = samples;
    }
  }
  if (best.empty())
    throw data_error("evaluate: no generator checkpoint (g_*.bin) in " + run_dir);
  return best;
}

// Two disjoint balanced halves of the evaluation set, rows per half fixed.
std::pair<Matrix, Matrix> disjoint_real_halves(const dataset::BalancedDataset& ds,
                                               std::size_t per_half,
                                               std::uint64_t seed) {
  const std::size_t per_class_half = per_half / 2;
  std::vector<std::size_t> a_rows, b_rows;
  for (int label = 0; label < 2; ++label) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < ds.count(); ++i)
      if (ds.labels[i] == label) rows.push_back(i);
    if (rows.size() < 2 * per_class_half)
      throw data_error("evaluate --self-test: class " + std::to_string(label) +
                       " has " + std::to_string(rows.size()) + " rows, needs " +
                       std::to_string(2 * per_class_half));
    rng::Stream stream(rng::derive_seed(seed, "self-test", label));
    for (std::size_t i = rows.size() - 1; i > 0; --i)
      std::swap(rows[i], rows[stream.next_index(i + 1)]);
    a_rows.insert(a_rows.end(), rows.begin(), rows.begin() + per_class_half);
    b_rows.insert(b_rows.end(), rows.begin() + per_class_half,
                  rows.begin() + 2 * per_class_half);
  }
  auto gather = [&](const std::vector<std::size_t>& rows) {
    Matrix m(rows.size(), dataset::kImageDim);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < dataset::kImageDim; ++j)
        m(r, j) = static_cast<double>(ds.pixels[rows[r] * dataset::kImageDim + j]);
    return m;
  };
  return {gather(a_rows), gather(b_rows)};
}

void cmd_evaluate(const EvaluateArgs& args) {
  auto cfg = config::load(args.run_dir + "/config.ini");
  if (!args.embedding.empty()) cfg.embedding = args.embedding;
  if (!args.eval_cache.empty()) cfg.eval_cache = args.eval_cache;
  if (args.eval_samples > 0) cfg.eval_samples = args.eval_samples;
  const std::uint64_t seed = args.seed > 0 ? args.seed : cfg.train.seed;
  cfg.validate(false);
  if (!fs::exists(cfg.eval_cache))
    throw data_error("evaluate: eval cache '" + cfg.eval_cache + "' does not exist");
  const auto eval_ds = dataset::read_cache(cfg.eval_cache);

  if (args.self_test) {
    const auto [half_a, half_b] =
        disjoint_real_halves(eval_ds, cfg.eval_samples, seed);
    auto embedding = metrics::Embedding::from_name(cfg.embedding);
    if (embedding.needs_fit()) embedding.fit(half_a);
    const Matrix fa = embedding.embed(half_a);
    const Matrix fb = embedding.embed(half_b);
    const double fid = metrics::fid(metrics::gaussian_summary(fa),
                                    metrics::gaussian_summary(fb));
    const double kid_linear = metrics::kid(fa, fb, metrics::KidVariant::paper_linear);
    const double kid_poly = metrics::kid(fa, fb, metrics::KidVariant::poly_mmd);
    std::cout << "self-test (" << half_a.rows << " vs " << half_b.rows
              << " disjoint real images, embedding " << cfg.embedding
              << "): fid=" << fmt17(fid) << " kid_linear=" << fmt17(kid_linear)
              << " kid_poly=" << fmt17(kid_poly) << "\n";
    return;
  }

  const std::string checkpoint =
      args.checkpoint.empty() ? newest_generator_checkpoint(args.run_dir)
                              : args.checkpoint;
  if (!fs::exists(checkpoint))
    throw data_error("evaluate: checkpoint '" + checkpoint + "' does not exist");
  const std::uint64_t samples_seen = samples_from_checkpoint_name(checkpoint);
  const auto generator = nnet::load_net(checkpoint);
  if (generator.input_dim() != cfg.train.latent_dim ||
      generator.output_dim() != dataset::kImageDim)
    throw data_error("evaluate: checkpoint '" + checkpoint + "' has shape " +
                     std::to_string(generator.input_dim()) + " -> " +
                     std::to_string(generator.output_dim()) +
                     ", expected " + std::to_string(cfg.train.latent_dim) + " -> 784");

  const auto evaluator =
      MetricsEvaluator::build(cfg.embedding, eval_ds, cfg.eval_samples, cfg.train.seed);
  const Matrix generated = generate_images(
      generator, cfg.train, evaluator.rows, rng::derive_seed(seed, "eval", samples_seen));
  const MetricRow row = evaluator.score(generated);

  const std::string metrics_path = args.run_dir + "/metrics.csv";
  const bool fresh = !fs::exists(metrics_path);
  std::ofstream out(metrics_path, std::ios::app);
  if (!out) throw data_error("evaluate: cannot open " + metrics_path + " for append");
  if (fresh) out << kMetricsHeader << "\n";
  out << format_metric_row(samples_seen, cfg.embedding, row) << "\n";

  std::cout << "checkpoint " << fs::path(checkpoint).filename().string() << " @ "
            << samples_seen << " samples: fid=" << fmt17(row.fid)
            << " kid_linear=" << fmt17(row.kid_linear)
            << " kid_poly=" << fmt17(row.kid_poly) << " (appended to " << metrics_path
            << ")\n";
}

// ---------------------------------------------------------------------------
// inspect-state

struct InspectArgs {
  int qubits = 3;
  std::string out_dir = "state_inspection";
  std::uint64_t shots = 8192;
  std::uint64_t seed = 1;
  bool no_noise = false;
  qsim::NoiseSpec noise;  // defaults match the experiments
};

void cmd_inspect_state(const InspectArgs& args) {
  const qsim::CircuitSpec circuit{args.qubits};
  circuit.validate();
  const qsim::NoiseSpec noise = args.no_noise ? qsim::NoiseSpec::none() : args.noise;
  noise.validate();

  const auto state = qsim::run_pipeline(circuit, noise);
  fs::create_directories(args.out_dir);
  const std::string dir = args.out_dir + "/";

  binio::write_file(dir + "circuit.txt", viz::circuit_ascii(circuit));

  const std::string suffix = std::to_string(args.qubits) + "-qubit state";
  const auto re = viz::make_cityscape(state.rho, viz::MatrixPart::real,
                                      "Re(rho), " + suffix);
  const auto im = viz::make_cityscape(state.rho, viz::MatrixPart::imag,
                                      "Im(rho), " + suffix);
  viz::write_svg(re, dir + "cityscape_re.svg");
  viz::write_csv(re, dir + "cityscape_re.csv");
  viz::write_svg(im, dir + "cityscape_im.svg");
  viz::write_csv(im, dir + "cityscape_im.csv");

  // Full Pauli enumeration is workable for n <= 3; larger states use weight 1.
  const int max_weight = args.qubits <= 3 ? args.qubits : 1;
  const auto pauli = viz::make_pauli_bars(qsim::pauli_expectations(state.rho, max_weight),
                                          "Pauli expectations, " + suffix);
  viz::write_svg(pauli, dir + "pauli.svg");
  viz::write_csv(pauli, dir + "pauli.csv");

  const auto bloch_data = qsim::bloch_vectors(state.rho);
  const auto bloch = viz::make_bloch(bloch_data, "Bloch vectors, " + suffix);
  viz::write_svg(bloch, dir + "bloch.svg");
  viz::write_csv(bloch, dir + "bloch.csv");

  const auto hist = qsim::sample_bitstrings(state.dist, args.shots, noise,
                                            rng::derive_seed(args.seed, "inspect-shots"));
  const auto hist_spec = viz::make_histogram(
      hist, std::to_string(args.shots) + " shots, " + suffix);
  viz::write_svg(hist_spec, dir + "histogram.svg");
  viz::write_csv(hist_spec, dir + "histogram.csv");

  std::cout << "wrote circuit.txt, cityscape/pauli/bloch/histogram CSV+SVG to "
            << args.out_dir << "\n";
  std::cout << "trace deviation: " << fmt17(qsim::trace_deviation(state.rho)) << "\n";
  for (std::size_t q = 0; q < bloch_data.size(); ++q) {
    const auto& v = bloch_data[q];
    std::cout << "bloch q" << q << ": (" << fmt17(v[0]) << ", " << fmt17(v[1]) << ", "
              << fmt17(v[2]) << ")\n";
  }
}

// ---------------------------------------------------------------------------
// report

struct RunData {
  std::string dir;
  config::ExperimentConfig cfg;
  nlohmann::json summary;
  // train.csv columns
  std::vector<double> log_samples, loss_d, loss_g;
  // metrics.csv columns
  std::vector<double> metric_samples, fid, kid_linear, kid_poly;
  std::string name() const { return cfg.train.model_name(); }
};

RunData load_run(const std::string& dir) {
  RunData run;
  run.dir = dir;
  run.cfg = config::load(dir + "/config.ini");

  const std::string summary_path = dir + "/summary.json";
  const auto bytes = binio::read_file(summary_path);
  run.summary = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (run.summary.is_discarded())
    throw data_error(summary_path + ": malformed JSON");

  const std::string log_path = dir + "/train.csv";
  const auto log_lines = read_lines(log_path);
  if (log_lines.empty() || log_lines[0] != gan::train_log_header())
    throw data_error(log_path + ": missing or unexpected header row");
  for (std::size_t i = 1; i < log_lines.size(); ++i) {
    const auto fields = split_fields(log_lines[i]);
    if (fields.size() != 6)
      throw data_error(log_path + ": row " + std::to_string(i) + " has " +
                       std::to_string(fields.size()) + " fields, expected 6");
    run.log_samples.push_back(parse_csv_double(fields[0], log_path));
    run.loss_d.push_back(parse_csv_double(fields[2], log_path));
    run.loss_g.push_back(parse_csv_double(fields[3], log_path));
  }

  const std::string metrics_path = dir + "/metrics.csv";
  const auto metric_lines = read_lines(metrics_path);
  if (metric_lines.empty() || metric_lines[0] != kMetricsHeader)
    throw data_error(metrics_path + ": missing or unexpected header row");
  for (std::size_t i = 1; i < metric_lines.size(); ++i) {
    const auto fields = split_fields(metric_lines[i]);
    if (fields.size() != 5)
      throw data_error(metrics_path + ": row " + std::to_string(i) + " has " +
                       std::to_string(fields.size()) + " fields, expected 5");
    run.metric_samples.push_back(parse_csv_double(fields[0], metrics_path));
    run.fid.push_back(parse_csv_double(fields[2], metrics_path));
    run.kid_linear.push_back(parse_csv_double(fields[3], metrics_path));
    run.kid_poly.push_back(parse_csv_double(fields[4], metrics_path));
  }
  if (run.metric_samples.empty())
    throw data_error(metrics_path + ": no metric rows (run incomplete?)");
  return run;
}

void cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  std::vector<RunData> runs;
  for (const auto& dir : run_dirs) runs.push_back(load_run(dir));

  // Metric values are only comparable under one embedding; refuse mixes.
  for (const auto& run : runs)
    if (run.cfg.embedding != runs.front().cfg.embedding) {
      std::string listing;
      for (const auto& r : runs)
        listing += "\n  " + r.dir + ": embedding " + r.cfg.embedding;
      throw usage_error("report: runs use different embeddings and cannot be merged:" +
                        listing);
    }

  fs::create_directories(out_dir);
  const std::string dir = out_dir + "/";

  std::string table2 = "metric";
  for (const auto& run : runs) table2 += "," + run.name();
  table2 += "\n";
  const auto metric_table_row = [&](const char* label, auto getter) {
    std::string row(label);
    for (const auto& run : runs) row += "," + fmt17(getter(run));
    return row + "\n";
  };
  table2 += metric_table_row("fid", [](const RunData& r) { return r.fid.back(); });
  table2 += metric_table_row("kid_linear",
                             [](const RunData& r) { return r.kid_linear.back(); });
  table2 += metric_table_row("kid_poly",
                             [](const RunData& r) { return r.kid_poly.back(); });
  binio::write_file(dir + "table2.csv", table2);

  std::string table3 = "quantity";
  for (const auto& run : runs) table3 += "," + run.name();
  table3 += "\n";
  const auto summary_row = [&](const char* label, auto getter) {
    std::string row(label);
    for (const auto& run : runs) row += "," + getter(run);
    return row + "\n";
  };
  table3 += summary_row("qubits", [](const RunData& r) {
    return std::to_string(r.cfg.train.n_qubits);
  });
  table3 += summary_row("latent_dim", [](const RunData& r) {
    return std::to_string(r.cfg.train.latent_dim);
  });
  table3 += summary_row("epochs", [](const RunData& r) {
    return std::to_string(r.cfg.train.epochs);
  });
  table3 += summary_row("samples_seen", [](const RunData& r) {
    return r.summary.at("samples_seen").dump();
  });
  table3 += summary_row("wall_seconds_per_epoch_mean", [](const RunData& r) {
    return fmt17(r.summary.at("wall_seconds_per_epoch_mean").get<double>());
  });
  table3 += summary_row("shots_total", [](const RunData& r) {
    return r.summary.at("shots_total").dump();
  });
  table3 += summary_row("shots_if_latents_reused", [](const RunData& r) {
    return r.summary.at("shots_if_latents_reused").dump();
  });
  binio::write_file(dir + "table3.csv", table3);

  std::vector<std::string> names;
  for (const auto& run : runs) names.push_back(run.name());
  const auto overlay = [&](const char* file, const char* title, const char* y_label,
                           auto x_getter, auto y_getter) {
    std::vector<std::vector<double>> xs, ys;
    for (const auto& run : runs) {
      xs.push_back(x_getter(run));
      ys.push_back(y_getter(run));
    }
    const auto spec =
        viz::make_multi_curve(xs, ys, names, title, "samples seen", y_label);
    viz::write_svg(spec, dir + file + std::string(".svg"));
    viz::write_csv(spec, dir + file + std::string(".csv"));
  };
  overlay("fig_loss_d", "Discriminator loss", "loss_d",
          [](const RunData& r) { return r.log_samples; },
          [](const RunData& r) { return r.loss_d; });
  overlay("fig_loss_g", "Generator loss", "loss_g",
          [](const RunData& r) { return r.log_samples; },
          [](const RunData& r) { return r.loss_g; });
  overlay("fig_fid", "FID over training", "fid",
          [](const RunData& r) { return r.metric_samples; },
          [](const RunData& r) { return r.fid; });
  overlay("fig_kid_linear", "KID (squared mean difference) over training", "kid_linear",
          [](const RunData& r) { return r.metric_samples; },
          [](const RunData& r) { return r.kid_linear; });
  overlay("fig_kid_poly", "KID (unbiased polynomial MMD) over training", "kid_poly",
          [](const RunData& r) { return r.metric_samples; },
          [](const RunData& r) { return r.kid_poly; });

  std::cout << "report for " << runs.size() << " run(s) -> " << out_dir
            << " (table2.csv, table3.csv, 5 figure pairs)\n";
}

// ---------------------------------------------------------------------------
// option wiring

void add_noise_options(CLI::App* cmd, qsim::NoiseSpec& noise) {
  cmd->add_option("--depolarizing-p", noise.depolarizing_p,
                  "depolarizing probability per gate");
  cmd->add_option("--damping-gamma", noise.amplitude_damping_gamma,
                  "amplitude damping strength per qubit");
  cmd->add_option("--readout-p01", noise.readout_p01, "P(read 1 | true 0)");
  cmd->add_option("--readout-p10", noise.readout_p10, "P(read 0 | true 1)");
}

struct TrainFlagOverrides {
  std::string config_path, model, run_dir, train_cache, eval_cache, embedding;
  std::uint64_t qubits = 0, latent_dim = 0, epochs = 0, batch_size = 0, seed = 0;
  std::uint64_t eval_every = 0, eval_samples = 0, subset_per_class = 0;
  double lr = 0.0, beta1 = 0.0, beta2 = 0.0;
  qsim::NoiseSpec noise;
  bool force = false;
};

void add_train_options(CLI::App* cmd, TrainFlagOverrides& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file");
  cmd->add_option("--model", flags.model, "classical | hqcgan");
  cmd->add_option("--qubits", flags.qubits, "qubit count for hqcgan (3, 5 or 7)");
  cmd->add_option("--latent-dim", flags.latent_dim, "latent dimension override");
  cmd->add_option("--epochs", flags.epochs, "training epochs");
  cmd->add_option("--batch-size", flags.batch_size, "batch size");
  cmd->add_option("--lr", flags.lr, "Adam learning rate");
  cmd->add_option("--beta1", flags.beta1, "Adam beta1");
  cmd->add_option("--beta2", flags.beta2, "Adam beta2");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--eval-every", flags.eval_every,
                  "evaluation interval in samples seen");
  cmd->add_option("--embedding", flags.embedding, "metric embedding: raw|pca<k>|rp<k>");
  cmd->add_option("--eval-samples", flags.eval_samples, "rows per metric evaluation");
  cmd->add_option("--train-cache", flags.train_cache, "training cache path");
  cmd->add_option("--eval-cache", flags.eval_cache, "evaluation cache path");
  cmd->add_option("--subset-per-class", flags.subset_per_class,
                  "train on this many images per class (0 = all)");
  cmd->add_option("--run-dir", flags.run_dir, "output run directory");
  add_noise_options(cmd, flags.noise);
  cmd->add_flag("--force", flags.force, "overwrite an existing run directory");
}

config::ExperimentConfig resolve_train_config(const CLI::App* cmd,
                                              const TrainFlagOverrides& flags) {
  config::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = config::load(flags.config_path);

  if (cmd->count("--model")) {
    if (flags.model == "classical") {
      cfg.train.model = gan::ModelKind::classical;
      if (!cmd->count("--qubits")) cfg.train.n_qubits = 0;
      if (!cmd->count("--latent-dim")) cfg.train.latent_dim = 100;
    } else if (flags.model == "hqcgan") {
      cfg.train.model = gan::ModelKind::hqcgan;
    } else {
      throw usage_error("--model must be 'classical' or 'hqcgan', got '" + flags.model +
                        "'");
    }
  }
  if (cmd->count("--qubits")) {
    cfg.train.n_qubits = static_cast<int>(flags.qubits);
    if (cfg.train.model == gan::ModelKind::hqcgan && !cmd->count("--latent-dim"))
      cfg.train.latent_dim = flags.qubits;
  }
  if (cmd->count("--latent-dim")) cfg.train.latent_dim = flags.latent_dim;
  if (cmd->count("--epochs")) cfg.train.epochs = flags.epochs;
  if (cmd->count("--batch-size")) cfg.train.batch_size = flags.batch_size;
  if (cmd->count("--lr")) cfg.train.lr = flags.lr;
  if (cmd->count("--beta1")) cfg.train.beta1 = flags.beta1;
  if (cmd->count("--beta2")) cfg.train.beta2 = flags.beta2;
  if (cmd->count("--seed")) cfg.train.seed = flags.seed;
  if (cmd->count("--eval-every")) cfg.train.eval_every_samples = flags.eval_every;
  if (cmd->count("--embedding")) cfg.embedding = flags.embedding;
  if (cmd->count("--eval-samples")) cfg.eval_samples = flags.eval_samples;
  if (cmd->count("--train-cache")) cfg.train_cache = flags.train_cache;
  if (cmd->count("--eval-cache")) cfg.eval_cache = flags.eval_cache;
  if (cmd->count("--subset-per-class")) cfg.subset_per_class = flags.subset_per_class;
  if (cmd->count("--run-dir")) cfg.run_dir = flags.run_dir;
  if (cmd->count("--depolarizing-p"))
    cfg.train.noise.depolarizing_p = flags.noise.depolarizing_p;
  if (cmd->count("--damping-gamma"))
    cfg.train.noise.amplitude_damping_gamma = flags.noise.amplitude_damping_gamma;
  if (cmd->count("--readout-p01")) cfg.train.noise.readout_p01 = flags.noise.readout_p01;
  if (cmd->count("--readout-p10")) cfg.train.noise.readout_p10 = flags.noise.readout_p10;

  apply_data_dir_env(cfg);
  return cfg;
}

// paper-matrix: the four-model experiment grid with shared data and seed.
void cmd_paper_matrix(const config::ExperimentConfig& base, const std::string& out_base,
                      bool force) {
  struct ModelRow {
    gan::ModelKind kind;
    int qubits;
    std::size_t latent;
  };
  const std::vector<ModelRow> grid = {{gan::ModelKind::classical, 0, 100},
                                      {gan::ModelKind::hqcgan, 3, 3},
                                      {gan::ModelKind::hqcgan, 5, 5},
                                      {gan::ModelKind::hqcgan, 7, 7}};
  std::vector<std::string> run_dirs;
  for (const auto& row : grid) {
    config::ExperimentConfig cfg = base;
    cfg.train.model = row.kind;
    cfg.train.n_qubits = row.qubits;
    cfg.train.latent_dim = row.latent;
    cfg.run_dir = out_base + "/" + cfg.train.model_name();
    run_dirs.push_back(cfg.run_dir);
    cmd_train(cfg, force);
  }
  cmd_report(run_dirs, out_base + "/report");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"hybrid quantum-classical GAN: data prep, training, metrics and "
               "state diagnostics"};
  app.require_subcommand(1);

  // prepare-data ------------------------------------------------------------
  PrepareArgs prep;
  auto* prep_cmd = app.add_subcommand(
      "prepare-data", "parse IDX digit files into balanced binary caches");
  prep_cmd->add_option("--data-dir", prep.data_dir,
                       "data directory (default: $HQCGAN_DATA_DIR or ./data)");
  prep_cmd->add_option("--train-images", prep.train_images, "training images IDX file");
  prep_cmd->add_option("--train-labels", prep.train_labels, "training labels IDX file");
  prep_cmd->add_option("--test-images", prep.test_images, "evaluation images IDX file");
  prep_cmd->add_option("--test-labels", prep.test_labels, "evaluation labels IDX file");
  prep_cmd->add_option("--out-train", prep.out_train, "training cache output path");
  prep_cmd->add_option("--out-eval", prep.out_eval, "evaluation cache output path");
  prep_cmd->add_option("--seed", prep.seed, "balancing/synthesis seed");
  prep_cmd->add_flag("--force", prep.force, "rebuild caches even if present");
  prep_cmd->add_flag("--synthesize", prep.synthesize,
                     "generate a synthetic digit corpus when IDX files are missing");
  prep_cmd->add_option("--synth-train-zeros", prep.synth_train_zeros,
                       "synthetic training zeros");
  prep_cmd->add_option("--synth-train-ones", prep.synth_train_ones,
                       "synthetic training ones");
  prep_cmd->add_option("--synth-test-zeros", prep.synth_test_zeros,
                       "synthetic evaluation zeros");
  prep_cmd->add_option("--synth-test-ones", prep.synth_test_ones,
                       "synthetic evaluation ones");
  prep_cmd->callback([&]() { cmd_prepare_data(prep); });

  // train ---------------------------------------------------------------
  TrainFlagOverrides train_flags;
  auto* train_cmd =
      app.add_subcommand("train", "train one model and write a run directory");
  add_train_options(train_cmd, train_flags);
  train_cmd->callback([&]() {
    cmd_train(resolve_train_config(train_cmd, train_flags), train_flags.force);
  });

  // evaluate ---------------------------------------------------------------
  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "compute FID/KID for a checkpoint against held-out real images");
  eval_cmd->add_option("--run", eval_args.run_dir, "run directory")->required();
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint,
                       "generator checkpoint (default: newest in run)");
  eval_cmd->add_option("--embedding", eval_args.embedding, "embedding override");
  eval_cmd->add_option("--eval-cache", eval_args.eval_cache, "eval cache override");
  eval_cmd->add_option("--eval-samples", eval_args.eval_samples,
                       "rows per side (default: run config)");
  eval_cmd->add_option("--seed", eval_args.seed, "evaluation seed override");
  eval_cmd->add_flag("--self-test", eval_args.self_test,
                     "score two disjoint real halves instead of a checkpoint");
  eval_cmd->callback([&]() { cmd_evaluate(eval_args); });

  // inspect-state ------------------------------------------------------------
  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand(
      "inspect-state", "export circuit, state and measurement diagnostics");
  inspect_cmd->add_option("--qubits", inspect.qubits, "qubit count (1..10)");
  inspect_cmd->add_option("--out", inspect.out_dir, "output directory");
  inspect_cmd->add_option("--shots", inspect.shots, "histogram shots");
  inspect_cmd->add_option("--seed", inspect.seed, "sampling seed");
  inspect_cmd->add_flag("--no-noise", inspect.no_noise, "disable all noise channels");
  add_noise_options(inspect_cmd, inspect.noise);
  inspect_cmd->callback([&]() { cmd_inspect_state(inspect); });

  // report ---------------------------------------------------------------
  std::vector<std::string> report_runs;
  std::string report_out = "report";
  auto* report_cmd = app.add_subcommand(
      "report", "aggregate completed runs into comparison tables and curves");
  report_cmd->add_option("runs", report_runs, "run directories")->required();
  report_cmd->add_option("--out", report_out, "report output directory");
  report_cmd->callback([&]() { cmd_report(report_runs, report_out); });

  // paper-matrix ------------------------------------------------------------
  TrainFlagOverrides matrix_flags;
  std::string matrix_out = "runs";
  auto* matrix_cmd = app.add_subcommand(
      "paper-matrix",
      "train all four model configurations (classical, 3, 5, 7 qubits) and report");
  add_train_options(matrix_cmd, matrix_flags);
  matrix_cmd->add_option("--out", matrix_out, "base directory for the four runs");
  matrix_cmd->callback([&]() {
    config::ExperimentConfig base = resolve_train_config(matrix_cmd, matrix_flags);
    cmd_paper_matrix(base, matrix_out, matrix_flags.force);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 1;
  } catch (const usage_error& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 1;
  } catch (const data_error& e) {
    std::cerr << "error[data]: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "error[numeric]: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error[data]: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hqcgan::cli
