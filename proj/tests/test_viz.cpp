#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>
#include <vector>

#include "hqcgan/qsim.hpp"
#include "hqcgan/viz.hpp"

using namespace hqcgan;

namespace {

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string::npos) end = s.size();
    lines.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return fields;
}

}  // namespace

TEST_CASE("two-point curve renders one polyline with two vertices", "[viz]") {
  const auto spec = viz::make_curve({0.0, 1.0}, {{2.5, 3.5}}, {"loss"}, "t", "x", "y");
  const std::string svg = viz::render_svg(spec);
  REQUIRE(count_substr(svg, "<polyline") == 1);

  const std::size_t start = svg.find("points=\"") + 8;
  const std::size_t end = svg.find('"', start);
  const std::string points = svg.substr(start, end - start);
  REQUIRE(count_substr(points, ",") == 2);   // one comma per vertex
  REQUIRE(count_substr(points, " ") == 1);   // vertices separated by one space
}

TEST_CASE("rendering the same spec twice is byte-identical", "[viz]") {
  const auto rho = qsim::apply_hadamard_all(qsim::init_ground(3));
  const auto spec = viz::make_cityscape(rho, viz::MatrixPart::real, "state");
  REQUIRE(viz::render_svg(spec) == viz::render_svg(spec));
  REQUIRE(viz::to_csv(spec) == viz::to_csv(spec));

  const auto curve =
      viz::make_curve({0.0, 1.0, 2.0}, {{1.0, 0.5, 0.25}}, {"fid"}, "t", "x", "y");
  REQUIRE(viz::render_svg(curve) == viz::render_svg(curve));
}

TEST_CASE("noise-free cityscape has 64 identical cells", "[viz]") {
  // H on every qubit of |000> gives rho_ij = 1/8 for all 64 entries, so every
  // heat cell must render with the same fill and the same printed value.
  const auto rho = qsim::apply_hadamard_all(qsim::init_ground(3));
  const auto spec = viz::make_cityscape(rho, viz::MatrixPart::real, "uniform");
  REQUIRE(spec.heat.rows == 8);
  const std::string svg = viz::render_svg(spec);
  REQUIRE(count_substr(svg, "fill=\"rgb(178,24,43)\"") == 64);
  REQUIRE(count_substr(svg, ">0.125000</text>") == 64);

  const auto imag = viz::make_cityscape(rho, viz::MatrixPart::imag, "uniform-im");
  for (double v : imag.heat.data) REQUIRE(v == 0.0);
}

TEST_CASE("csv payloads round-trip the plotted values", "[viz]") {
  SECTION("curve") {
    const std::vector<double> x{0.0, 0.1, 0.2, 0.30000000000000004};
    const std::vector<std::vector<double>> ys{{1.0 / 3.0, 0.2, -5.5, 1e-17},
                                              {2.0, 3.0, 4.0, 5.0}};
    const auto spec = viz::make_curve(x, ys, {"a", "b"}, "t", "x", "y");
    const auto lines = split_lines(viz::to_csv(spec));
    REQUIRE(lines.size() == 5);
    REQUIRE(lines[0] == "x,a,b");
    for (std::size_t i = 0; i < 4; ++i) {
      const auto fields = split_fields(lines[i + 1]);
      REQUIRE(fields.size() == 3);
      REQUIRE(std::strtod(fields[0].c_str(), nullptr) == x[i]);
      REQUIRE(std::strtod(fields[1].c_str(), nullptr) == ys[0][i]);
      REQUIRE(std::strtod(fields[2].c_str(), nullptr) == ys[1][i]);
    }
  }
  SECTION("cityscape") {
    const auto rho = qsim::apply_depolarizing(
        qsim::apply_hadamard_all(qsim::init_ground(2)), 0.1, 0);
    const auto spec = viz::make_cityscape(rho, viz::MatrixPart::real, "c");
    const auto lines = split_lines(viz::to_csv(spec));
    REQUIRE(lines[0].rfind("# ", 0) == 0);  // documented bit order
    REQUIRE(lines[0].find("most-significant") != std::string::npos);
    REQUIRE(lines[1] == "row,col,value");
    REQUIRE(lines.size() == 2 + 16);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const auto fields = split_fields(lines[2 + i * 4 + j]);
        REQUIRE(fields[0] == spec.heat_labels[i]);
        REQUIRE(fields[1] == spec.heat_labels[j]);
        REQUIRE(std::strtod(fields[2].c_str(), nullptr) == spec.heat(i, j));
      }
  }
  SECTION("bloch") {
    const auto rho = qsim::apply_hadamard(qsim::init_ground(2), 0);
    const auto spec = viz::make_bloch(qsim::bloch_vectors(rho), "b");
    const auto lines = split_lines(viz::to_csv(spec));
    REQUIRE(lines[0] == "qubit,x,y,z");
    REQUIRE(lines.size() == 3);
    const auto q0 = split_fields(lines[1]);
    REQUIRE(std::strtod(q0[1].c_str(), nullptr) == spec.bloch[0][0]);
    REQUIRE(std::strtod(q0[3].c_str(), nullptr) == spec.bloch[0][2]);
  }
}

TEST_CASE("overlay curves carry per-series grids", "[viz]") {
  const auto spec = viz::make_multi_curve({{0.0, 1.0}, {0.0, 2.0, 4.0}},
                                          {{1.0, 2.0}, {3.0, 2.0, 1.0}},
                                          {"a", "b"}, "overlay", "x", "y");
  const std::string svg = viz::render_svg(spec);
  REQUIRE(count_substr(svg, "<polyline") == 2);
  REQUIRE(viz::render_svg(spec) == svg);

  const auto lines = split_lines(viz::to_csv(spec));
  REQUIRE(lines[0] == "series,x,y");
  REQUIRE(lines.size() == 1 + 2 + 3);
  REQUIRE(lines[1].rfind("a,0,", 0) == 0);
  REQUIRE(lines[3].rfind("b,0,", 0) == 0);

  REQUIRE_THROWS_AS(viz::make_multi_curve({{0.0}}, {{1.0, 2.0}}, {"a"}, "", "", ""),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(viz::make_multi_curve({{0.0}, {1.0}}, {{1.0}}, {"a"}, "", "", ""),
                    std::invalid_argument);
}

TEST_CASE("histogram spec covers every basis state", "[viz]") {
  const auto state = qsim::run_pipeline({3}, qsim::NoiseSpec::none());
  const auto hist = qsim::sample_bitstrings(state.dist, 1024, qsim::NoiseSpec::none(), 5);
  const auto spec = viz::make_histogram(hist, "outcomes");
  REQUIRE(spec.bar_labels.size() == 8);
  REQUIRE(spec.bar_labels.front() == "000");
  REQUIRE(spec.bar_labels.back() == "111");
  double total = 0.0;
  for (double v : spec.bar_values) total += v;
  REQUIRE(total == Catch::Approx(1.0).margin(1e-12));

  const auto lines = split_lines(viz::to_csv(spec));
  REQUIRE(lines[0].rfind("# ", 0) == 0);
  REQUIRE(lines[1] == "bitstring,frequency");
  REQUIRE(lines.size() == 2 + 8);
}

TEST_CASE("pauli bar specs carry expectations in order", "[viz]") {
  const auto rho = qsim::apply_hadamard_all(qsim::init_ground(2));
  const auto spec = viz::make_pauli_bars(qsim::pauli_expectations(rho, 2), "pauli");
  REQUIRE(spec.bar_labels.size() == 16);
  for (double v : spec.bar_values) {
    REQUIRE(v >= -1.0 - 1e-12);
    REQUIRE(v <= 1.0 + 1e-12);
  }
  const std::string svg = viz::render_svg(spec);
  REQUIRE(count_substr(svg, "<rect") >= 17);  // background + 16 bars
}

TEST_CASE("bloch render shows one panel per qubit", "[viz]") {
  const auto state = qsim::run_pipeline({3}, qsim::NoiseSpec{0.01, 0.03, 0.02, 0.02});
  const auto spec = viz::make_bloch(qsim::bloch_vectors(state.rho), "bloch");
  const std::string svg = viz::render_svg(spec);
  REQUIRE(count_substr(svg, ">q0: (") == 1);
  REQUIRE(count_substr(svg, ">q1: (") == 1);
  REQUIRE(count_substr(svg, ">q2: (") == 1);
}

TEST_CASE("plot specs reject malformed payloads", "[viz]") {
  viz::PlotSpec bad_bloch;
  bad_bloch.kind = viz::PlotSpec::Kind::bloch;
  bad_bloch.bloch.push_back({1.0, 1.0, 1.0});  // norm sqrt(3)
  REQUIRE_THROWS_AS(viz::render_svg(bad_bloch), std::invalid_argument);

  REQUIRE_THROWS_AS(viz::make_curve({0.0, 1.0}, {{1.0}}, {"a"}, "", "", ""),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(viz::make_curve({0.0}, {{1.0}}, {}, "", "", ""),
                    std::invalid_argument);

  viz::PlotSpec bad_hist;
  bad_hist.kind = viz::PlotSpec::Kind::histogram;
  bad_hist.bar_labels = {"00"};
  bad_hist.bar_values = {-0.5};
  REQUIRE_THROWS_AS(viz::to_csv(bad_hist), std::invalid_argument);
}

TEST_CASE("circuit diagrams align across qubit counts", "[viz]") {
  const std::string one = viz::circuit_ascii({1});
  const auto lines1 = split_lines(one);
  REQUIRE(lines1.size() == 1);
  REQUIRE(lines1[0].find("|0>") != std::string::npos);
  REQUIRE(lines1[0].find("[H]") != std::string::npos);
  REQUIRE(lines1[0].find("[M]") != std::string::npos);

  for (int n : {3, 7}) {
    const auto lines = split_lines(viz::circuit_ascii({n}));
    REQUIRE(lines.size() == static_cast<std::size_t>(n));
    const std::size_t h_col = lines[0].find("[H]");
    const std::size_t m_col = lines[0].find("[M]");
    for (const auto& line : lines) {
      REQUIRE(line.size() == lines[0].size());
      REQUIRE(line.find("[H]") == h_col);
      REQUIRE(line.find("[M]") == m_col);
    }
  }
}

TEST_CASE("pgm bytes encode the denormalized image", "[viz]") {
  std::vector<float> pixels(784, 0.0f);
  pixels[0] = -1.0f;   // black
  pixels[1] = 1.0f;    // white
  pixels[2] = -2.0f;   // clamped to black
  const std::string pgm = viz::pgm_bytes(pixels);
  const std::string header = "P5\n28 28\n255\n";
  REQUIRE(pgm.rfind(header, 0) == 0);
  REQUIRE(pgm.size() == header.size() + 784);
  const auto* body = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  REQUIRE(body[0] == 0);
  REQUIRE(body[1] == 255);
  REQUIRE(body[2] == 0);
  REQUIRE(body[3] == 128);  // 0.0 -> 127.5 rounds away from zero

  REQUIRE_THROWS_AS(viz::pgm_bytes(std::vector<float>(10, 0.0f)),
                    std::invalid_argument);
}
