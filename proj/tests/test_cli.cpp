#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "hqcgan/binio.hpp"
#include "hqcgan/config.hpp"

// End-to-end tests of the command-line binary: every invocation spawns the
// real executable (path injected by the build as HQCGAN_BIN) inside a shared
// scratch workspace with a small synthetic dataset.
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

std::string read_text(const fs::path& path) {
  const auto bytes = hqcgan::binio::read_file(path.string());
  return std::string(bytes.begin(), bytes.end());
}

// Workspace shared by all cases in this binary; prepared once.
const fs::path& workspace() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const fs::path out_file = workspace() / "stdout.txt";
  const fs::path err_file = workspace() / "stderr.txt";
  const std::string command = "cd '" + workspace().string() + "' && " + env_prefix +
                              HQCGAN_BIN " " + args + " > '" + out_file.string() +
                              "' 2> '" + err_file.string() + "'";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_text(out_file);
  result.err = read_text(err_file);
  return result;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// train.csv with the wall-clock column removed, for run-to-run comparison.
std::string strip_wall_column(const std::string& csv) {
  std::string out;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string::npos) end = csv.size();
    const auto fields = split_fields(csv.substr(start, end - start));
    start = end + 1;
    REQUIRE(fields.size() == 6);
    out += fields[0] + "," + fields[1] + "," + fields[2] + "," + fields[3] + "," +
           fields[5] + "\n";
  }
  return out;
}

// Lazily prepares the shared dataset caches (small synthetic corpus).
void ensure_data() {
  static const bool done = [] {
    const RunResult r = run_cli(
        "prepare-data --synthesize --data-dir data "
        "--synth-train-zeros 300 --synth-train-ones 400 "
        "--synth-test-zeros 200 --synth-test-ones 200");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "300 / 300"));
    REQUIRE(contains(r.out, "200 / 200"));
    REQUIRE(fs::exists(workspace() / "data/train_cache.bin"));
    REQUIRE(fs::exists(workspace() / "data/eval_cache.bin"));
    return true;
  }();
  (void)done;
}

const std::string kCommonTrainArgs =
    " --epochs 1 --subset-per-class 64 --eval-samples 200"
    " --train-cache data/train_cache.bin --eval-cache data/eval_cache.bin";

// Lazily trains the two runs most cases share.
void ensure_runs() {
  ensure_data();
  static const bool done = [] {
    const RunResult a =
        run_cli("train --model classical" + kCommonTrainArgs + " --run-dir run_a");
    REQUIRE(a.exit_code == 0);
    const RunResult b = run_cli("train --model hqcgan --qubits 3" + kCommonTrainArgs +
                                " --run-dir run_b");
    REQUIRE(b.exit_code == 0);
    return true;
  }();
  (void)done;
}

}  // namespace

TEST_CASE("prepare-data synthesizes, balances and is idempotent") {
  ensure_data();

  SECTION("second invocation is a no-op") {
    const RunResult r = run_cli("prepare-data --data-dir data");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "nothing to do"));
  }
  SECTION("synthesis is deterministic in the seed") {
    const RunResult r = run_cli(
        "prepare-data --synthesize --data-dir data2 "
        "--synth-train-zeros 300 --synth-train-ones 400 "
        "--synth-test-zeros 200 --synth-test-ones 200");
    REQUIRE(r.exit_code == 0);
    CHECK(hqcgan::binio::read_file((workspace() / "data/train_cache.bin").string()) ==
          hqcgan::binio::read_file((workspace() / "data2/train_cache.bin").string()));
    CHECK(hqcgan::binio::read_file((workspace() / "data/eval_cache.bin").string()) ==
          hqcgan::binio::read_file((workspace() / "data2/eval_cache.bin").string()));
  }
}

TEST_CASE("train writes a complete, well-formed run directory") {
  ensure_runs();
  const fs::path run = workspace() / "run_a";

  for (const char* name : {"config.ini", "train.csv", "metrics.csv", "summary.json"})
    CHECK(fs::exists(run / name));

  // 64 images/class -> 128 rows -> 2 batches -> 128 samples seen.
  CHECK(fs::exists(run / "g_classical_0000000000.bin"));
  CHECK(fs::exists(run / "g_classical_0000000128.bin"));
  CHECK(fs::exists(run / "d_classical_0000000128.bin"));
  std::size_t pgm_count = 0;
  for (const auto& entry : fs::directory_iterator(run))
    if (entry.path().extension() == ".pgm") ++pgm_count;
  CHECK(pgm_count == 32);  // 16-image grid at samples 0 and 128

  const std::string log = read_text(run / "train.csv");
  CHECK(contains(log, "samples_seen,epoch,loss_d,loss_g,wall_seconds_epoch,shots_total"));
  CHECK(line_count(log) == 2);  // header + one epoch row
  CHECK(contains(log, "\n128,1,"));

  const std::string metrics = read_text(run / "metrics.csv");
  CHECK(contains(metrics, "samples_seen,embedding,fid,kid_linear,kid_poly"));
  CHECK(line_count(metrics) == 3);  // header + evals at samples 0 and 128
  CHECK(contains(metrics, "\n0,pca64,"));
  CHECK(contains(metrics, "\n128,pca64,"));

  // The config snapshot reloads to exactly the settings this run used.
  const auto cfg = hqcgan::config::load((run / "config.ini").string());
  CHECK(cfg.train.model == hqcgan::gan::ModelKind::classical);
  CHECK(cfg.train.latent_dim == 100);
  CHECK(cfg.train.epochs == 1);
  CHECK(cfg.subset_per_class == 64);
  CHECK(cfg.eval_samples == 200);
  CHECK(cfg.embedding == "pca64");
  CHECK(cfg.run_dir == "run_a");
}

TEST_CASE("quantum training accounts for every shot") {
  ensure_runs();
  const std::string summary_text = read_text(workspace() / "run_b/summary.json");
  const auto summary = nlohmann::json::parse(summary_text);
  CHECK(summary.at("model") == "hqcgan3");
  CHECK(summary.at("qubits") == 3);
  CHECK(summary.at("latent_dim") == 3);
  CHECK(summary.at("samples_seen") == 128);
  // Discriminator and generator each draw fresh latents: two shots per sample.
  CHECK(summary.at("shots_total") == 256);
  CHECK(summary.at("shots_if_latents_reused") == 128);

  const auto classical = nlohmann::json::parse(read_text(workspace() / "run_a/summary.json"));
  CHECK(classical.at("shots_total") == 0);
  CHECK(classical.at("shots_if_latents_reused") == 0);
}

TEST_CASE("train refuses to clobber a finished run unless forced") {
  ensure_runs();
  const RunResult refused =
      run_cli("train --model classical" + kCommonTrainArgs + " --run-dir run_a");
  CHECK(refused.exit_code == 2);
  CHECK(contains(refused.err, "error[data]:"));
  CHECK(contains(refused.err, "--force"));

  const RunResult forced = run_cli("train --model classical" + kCommonTrainArgs +
                                   " --run-dir run_a --force");
  CHECK(forced.exit_code == 0);
}

TEST_CASE("training twice with one seed is bit-identical") {
  ensure_data();
  const std::string args = "train --model hqcgan --qubits 3 --seed 7" +
                           kCommonTrainArgs;
  REQUIRE(run_cli(args + " --run-dir rep_1").exit_code == 0);
  REQUIRE(run_cli(args + " --run-dir rep_2").exit_code == 0);

  const fs::path r1 = workspace() / "rep_1", r2 = workspace() / "rep_2";
  CHECK(read_text(r1 / "metrics.csv") == read_text(r2 / "metrics.csv"));
  CHECK(strip_wall_column(read_text(r1 / "train.csv")) ==
        strip_wall_column(read_text(r2 / "train.csv")));
  for (const char* name : {"g_hqcgan3_0000000128.bin", "d_hqcgan3_0000000128.bin"})
    CHECK(hqcgan::binio::read_file((r1 / name).string()) ==
          hqcgan::binio::read_file((r2 / name).string()));
  CHECK(read_text(r1 / "samples_hqcgan3_0000000128_00.pgm") ==
        read_text(r2 / "samples_hqcgan3_0000000128_00.pgm"));
}

TEST_CASE("evaluate scores checkpoints and reruns reproduce training metrics") {
  ensure_runs();
  const std::string before = read_text(workspace() / "run_b/metrics.csv");

  const RunResult r = run_cli("evaluate --run run_b");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.out, "g_hqcgan3_0000000128.bin"));
  CHECK(contains(r.out, "fid="));

  // The appended row equals the final training-time row: same checkpoint, same
  // evaluation seed path.
  const std::string after = read_text(workspace() / "run_b/metrics.csv");
  REQUIRE(line_count(after) == line_count(before) + 1);
  const std::string last_training_row = before.substr(
      before.rfind('\n', before.size() - 2) + 1);
  const std::string appended_row = after.substr(after.rfind('\n', after.size() - 2) + 1);
  CHECK(appended_row == last_training_row);

  SECTION("explicit checkpoint flag selects the same file") {
    const RunResult explicit_run =
        run_cli("evaluate --run run_b --checkpoint run_b/g_hqcgan3_0000000128.bin");
    CHECK(explicit_run.exit_code == 0);
    CHECK(contains(explicit_run.out, "fid="));
  }
  SECTION("missing run directory") {
    const RunResult missing = run_cli("evaluate --run no_such_run");
    CHECK(missing.exit_code == 2);
    CHECK(contains(missing.err, "error[data]:"));
  }
  SECTION("missing checkpoint file") {
    const RunResult missing = run_cli("evaluate --run run_b --checkpoint run_b/g_hqcgan3_0000009999.bin");
    CHECK(missing.exit_code == 2);
    CHECK(contains(missing.err, "error[data]:"));
  }
  SECTION("checkpoint name without a sample count") {
    std::ofstream(workspace() / "g_garbled_abc.bin") << "x";
    const RunResult garbled = run_cli("evaluate --run run_b --checkpoint g_garbled_abc.bin");
    CHECK(garbled.exit_code == 1);
    CHECK(contains(garbled.err, "error[usage]:"));
  }
}

TEST_CASE("evaluate self-test scores disjoint real halves deterministically") {
  ensure_runs();
  const std::string before = read_text(workspace() / "run_a/metrics.csv");

  const RunResult first = run_cli("evaluate --run run_a --self-test");
  REQUIRE(first.exit_code == 0);
  CHECK(contains(first.out, "self-test (200 vs 200"));
  CHECK(contains(first.out, "fid="));
  // Prints only; the metrics log is untouched.
  CHECK(read_text(workspace() / "run_a/metrics.csv") == before);

  const RunResult second = run_cli("evaluate --run run_a --self-test");
  CHECK(second.out == first.out);

  // An untrained generator scores far above the real-vs-real floor at the
  // same scale: compare the samples-0 metric row against the self-test value.
  const double floor_fid = std::strtod(
      first.out.c_str() + first.out.find("fid=") + 4, nullptr);
  const std::string metrics = read_text(workspace() / "run_a/metrics.csv");
  const std::size_t row0 = metrics.find("\n0,pca64,");
  REQUIRE(row0 != std::string::npos);
  const double untrained_fid =
      std::strtod(metrics.c_str() + row0 + std::string("\n0,pca64,").size(), nullptr);
  CHECK(untrained_fid > floor_fid);

  SECTION("floor stays below 1.0 at the 2000-vs-2000 scale") {
    // Needs a bigger evaluation corpus than the shared one.
    const RunResult prep = run_cli(
        "prepare-data --synthesize --data-dir data3 "
        "--synth-train-zeros 40 --synth-train-ones 40 "
        "--synth-test-zeros 2500 --synth-test-ones 2500");
    REQUIRE(prep.exit_code == 0);
    const RunResult big = run_cli(
        "evaluate --run run_a --self-test --eval-samples 2000"
        " --eval-cache data3/eval_cache.bin");
    REQUIRE(big.exit_code == 0);
    CHECK(contains(big.out, "self-test (2000 vs 2000"));
    const double fid =
        std::strtod(big.out.c_str() + big.out.find("fid=") + 4, nullptr);
    CHECK(fid > 0.0);
    CHECK(fid < 1.0);
  }
}

TEST_CASE("inspect-state exports the full diagnostic set") {
  const RunResult r = run_cli("inspect-state --qubits 3 --out inspect3 --shots 4096");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.out, "trace deviation"));
  for (const char* name :
       {"circuit.txt", "cityscape_re.svg", "cityscape_re.csv", "cityscape_im.svg",
        "cityscape_im.csv", "pauli.svg", "pauli.csv", "bloch.svg", "bloch.csv",
        "histogram.svg", "histogram.csv"})
    CHECK(fs::exists(workspace() / "inspect3" / name));

  const std::string circuit = read_text(workspace() / "inspect3/circuit.txt");
  CHECK(contains(circuit, "q0: |0>--[H]--[M]"));
  CHECK(contains(circuit, "q2: |0>--[H]--[M]"));

  // Default noise shortens every Bloch vector strictly below unit length.
  const std::string bloch = read_text(workspace() / "inspect3/bloch.csv");
  std::size_t checked = 0;
  for (std::size_t pos = bloch.find('\n'); pos != std::string::npos;
       pos = bloch.find('\n', pos + 1)) {
    if (pos + 1 >= bloch.size()) break;
    const auto fields = split_fields(bloch.substr(pos + 1, bloch.find('\n', pos + 1) -
                                                               pos - 1));
    if (fields.size() != 4 || fields[0] == "qubit") continue;
    const double x = std::strtod(fields[1].c_str(), nullptr);
    CHECK(x > 0.9);
    CHECK(x < 1.0);
    ++checked;
  }
  CHECK(checked == 3);

  SECTION("qubit count outside the simulator range") {
    const RunResult bad = run_cli("inspect-state --qubits 11 --out inspect11");
    CHECK(bad.exit_code == 1);
    CHECK(contains(bad.err, "error[usage]:"));
  }
  SECTION("noise-free run gives unit Bloch vectors and a near-uniform histogram") {
    const RunResult clean =
        run_cli("inspect-state --qubits 2 --out inspect2 --no-noise --shots 4096");
    REQUIRE(clean.exit_code == 0);

    const std::string clean_bloch = read_text(workspace() / "inspect2/bloch.csv");
    std::size_t clean_rows = 0;
    for (std::size_t pos = clean_bloch.find('\n'); pos != std::string::npos;
         pos = clean_bloch.find('\n', pos + 1)) {
      if (pos + 1 >= clean_bloch.size()) break;
      const auto fields = split_fields(
          clean_bloch.substr(pos + 1, clean_bloch.find('\n', pos + 1) - pos - 1));
      if (fields.size() != 4 || fields[0] == "qubit") continue;
      CHECK(std::abs(std::strtod(fields[1].c_str(), nullptr) - 1.0) < 1e-9);
      CHECK(std::abs(std::strtod(fields[2].c_str(), nullptr)) < 1e-9);
      CHECK(std::abs(std::strtod(fields[3].c_str(), nullptr)) < 1e-9);
      ++clean_rows;
    }
    CHECK(clean_rows == 2);

    const std::string hist = read_text(workspace() / "inspect2/histogram.csv");
    std::size_t rows = 0;
    for (std::size_t pos = hist.find('\n'); pos != std::string::npos;
         pos = hist.find('\n', pos + 1)) {
      if (pos + 1 >= hist.size()) break;
      const auto fields =
          split_fields(hist.substr(pos + 1, hist.find('\n', pos + 1) - pos - 1));
      if (fields.size() != 2 || fields[0] == "bitstring" || fields[0].empty() ||
          fields[0][0] == '#')
        continue;
      const double freq = std::strtod(fields[1].c_str(), nullptr);
      // 4096 shots over 4 states: each frequency within 5 sigma of 1/4.
      CHECK(freq > 0.25 - 0.034);
      CHECK(freq < 0.25 + 0.034);
      ++rows;
    }
    CHECK(rows == 4);
  }
}

TEST_CASE("report merges runs into tables and overlay figures") {
  ensure_runs();
  const RunResult r = run_cli("report run_a run_b --out rep");
  REQUIRE(r.exit_code == 0);

  for (const char* name :
       {"table2.csv", "table3.csv", "fig_loss_d.svg", "fig_loss_d.csv",
        "fig_loss_g.svg", "fig_loss_g.csv", "fig_fid.svg", "fig_fid.csv",
        "fig_kid_linear.svg", "fig_kid_linear.csv", "fig_kid_poly.svg",
        "fig_kid_poly.csv"})
    CHECK(fs::exists(workspace() / "rep" / name));

  const std::string table2 = read_text(workspace() / "rep/table2.csv");
  CHECK(contains(table2, "metric,classical,hqcgan3"));
  CHECK(contains(table2, "\nfid,"));
  CHECK(contains(table2, "\nkid_linear,"));
  CHECK(contains(table2, "\nkid_poly,"));

  const std::string table3 = read_text(workspace() / "rep/table3.csv");
  CHECK(contains(table3, "quantity,classical,hqcgan3"));
  CHECK(contains(table3, "\nqubits,0,3\n"));
  CHECK(contains(table3, "\nlatent_dim,100,3\n"));
  CHECK(contains(table3, "\nsamples_seen,128,128\n"));
  CHECK(contains(table3, "\nshots_total,0,256\n"));
  CHECK(contains(table3, "\nshots_if_latents_reused,0,128\n"));

  const std::string fig = read_text(workspace() / "rep/fig_fid.csv");
  CHECK(contains(fig, "series,x,y"));
  CHECK(contains(fig, "classical,"));
  CHECK(contains(fig, "hqcgan3,"));

  SECTION("runs scored under different embeddings cannot be merged") {
    const fs::path mixed = workspace() / "run_mixed";
    fs::remove_all(mixed);
    fs::copy(workspace() / "run_a", mixed, fs::copy_options::recursive);
    std::string ini = read_text(mixed / "config.ini");
    const std::size_t pos = ini.find("embedding = pca64");
    REQUIRE(pos != std::string::npos);
    ini.replace(pos, std::string("embedding = pca64").size(), "embedding = rp32");
    hqcgan::binio::write_file((mixed / "config.ini").string(), ini);

    const RunResult bad = run_cli("report run_mixed run_b --out rep_bad");
    CHECK(bad.exit_code == 1);
    CHECK(contains(bad.err, "error[usage]:"));
    CHECK(contains(bad.err, "rp32"));
    CHECK(contains(bad.err, "pca64"));
  }
  SECTION("a run directory without artifacts is a data error") {
    fs::create_directories(workspace() / "run_empty");
    const RunResult bad = run_cli("report run_empty --out rep_bad2");
    CHECK(bad.exit_code == 2);
    CHECK(contains(bad.err, "error[data]:"));
  }
  SECTION("a single run yields one-column tables") {
    const RunResult single = run_cli("report run_a --out rep_single");
    REQUIRE(single.exit_code == 0);
    const std::string single_t2 = read_text(workspace() / "rep_single/table2.csv");
    CHECK(contains(single_t2, "metric,classical\n"));
    CHECK(line_count(single_t2) == 4);  // header + fid + two kid variants
  }
}

TEST_CASE("the config snapshot alone reproduces a run") {
  ensure_data();
  const std::string args = "train --model hqcgan --qubits 3 --seed 7" +
                           kCommonTrainArgs;
  // rep_1 may exist from the rerun test; train it if this case runs first.
  if (!fs::exists(workspace() / "rep_1"))
    REQUIRE(run_cli(args + " --run-dir rep_1").exit_code == 0);

  const RunResult from_snapshot =
      run_cli("train --config rep_1/config.ini --run-dir rep_3");
  REQUIRE(from_snapshot.exit_code == 0);
  CHECK(read_text(workspace() / "rep_1/metrics.csv") ==
        read_text(workspace() / "rep_3/metrics.csv"));
  CHECK(strip_wall_column(read_text(workspace() / "rep_1/train.csv")) ==
        strip_wall_column(read_text(workspace() / "rep_3/train.csv")));
  CHECK(hqcgan::binio::read_file((workspace() / "rep_1/g_hqcgan3_0000000128.bin").string()) ==
        hqcgan::binio::read_file((workspace() / "rep_3/g_hqcgan3_0000000128.bin").string()));
}

TEST_CASE("cache paths fall back to the data-directory environment variable") {
  ensure_data();
  const RunResult r = run_cli(
      "train --model classical --epochs 1 --subset-per-class 64 --eval-samples 200"
      " --run-dir run_env",
      "HQCGAN_DATA_DIR=data ");
  REQUIRE(r.exit_code == 0);

  const auto cfg =
      hqcgan::config::load((workspace() / "run_env/config.ini").string());
  CHECK(cfg.train_cache == "data/train_cache.bin");
  CHECK(cfg.eval_cache == "data/eval_cache.bin");
}

TEST_CASE("bad invocations exit with the documented codes and prefixes") {
  ensure_data();

  const RunResult no_cmd = run_cli("");
  CHECK(no_cmd.exit_code == 1);
  CHECK(contains(no_cmd.err, "error[usage]:"));

  const RunResult bad_cmd = run_cli("frobnicate");
  CHECK(bad_cmd.exit_code == 1);
  CHECK(contains(bad_cmd.err, "error[usage]:"));

  const RunResult bad_flag = run_cli("train --no-such-flag");
  CHECK(bad_flag.exit_code == 1);
  CHECK(contains(bad_flag.err, "error[usage]:"));

  const RunResult bad_model = run_cli("train --model quantumish" + kCommonTrainArgs +
                                      " --run-dir run_nope");
  CHECK(bad_model.exit_code == 1);
  CHECK(contains(bad_model.err, "error[usage]:"));
  CHECK(contains(bad_model.err, "quantumish"));

  const RunResult bad_qubits = run_cli("train --model hqcgan --qubits 4" +
                                       kCommonTrainArgs + " --run-dir run_nope");
  CHECK(bad_qubits.exit_code == 1);
  CHECK(contains(bad_qubits.err, "error[usage]:"));

  const RunResult missing_cache = run_cli(
      "train --model classical --epochs 1 --train-cache no/such.bin"
      " --eval-cache data/eval_cache.bin --run-dir run_nope");
  CHECK(missing_cache.exit_code == 2);
  CHECK(contains(missing_cache.err, "error[data]:"));
  CHECK(contains(missing_cache.err, "prepare-data"));

  const RunResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(contains(help.out, "prepare-data"));
  CHECK(contains(help.out, "paper-matrix"));
}
