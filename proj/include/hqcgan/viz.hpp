#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hqcgan/linalg.hpp"
#include "hqcgan/qsim.hpp"

// Deterministic figure output: every plot is a pure function of its PlotSpec
// and renders to both an SVG image and a CSV sidecar carrying the same
// numbers. No timestamps, fixed float formatting, byte-stable across runs.
namespace hqcgan::viz {

struct PlotSpec {
  enum class Kind { cityscape, pauli_bars, bloch, histogram, curve };

  Kind kind = Kind::curve;
  std::string title;
  std::string x_label;
  std::string y_label;

  // cityscape: square grid of matrix entries with basis-state labels
  // (most-significant qubit first) on both axes.
  linalg::Matrix heat;
  std::vector<std::string> heat_labels;

  // pauli_bars / histogram: labelled bar values. Histogram values are
  // frequencies in [0, 1]; pauli bars live in [-1, 1].
  std::vector<std::string> bar_labels;
  std::vector<double> bar_values;

  // bloch: one (x, y, z) triple per qubit, each of norm <= 1 + 1e-9.
  std::vector<std::array<double, 3>> bloch;

  // curve: shared x grid with one or more named series, or (when curve_xs is
  // set) one x vector per series for overlays with unequal grids.
  std::vector<double> curve_x;
  std::vector<std::vector<double>> curve_xs;
  std::vector<std::vector<double>> curve_ys;
  std::vector<std::string> series_names;

  // std::invalid_argument when the payload does not match the kind.
  void validate() const;
};

// Spec builders for the quantum-state figure families.
enum class MatrixPart { real, imag };
PlotSpec make_cityscape(const qsim::DensityMatrix& rho, MatrixPart part,
                        const std::string& title);
PlotSpec make_pauli_bars(const std::map<std::string, double>& expectations,
                         const std::string& title);
PlotSpec make_bloch(const std::vector<std::array<double, 3>>& vectors,
                    const std::string& title);
PlotSpec make_histogram(const qsim::OutcomeHistogram& hist, const std::string& title);
PlotSpec make_curve(const std::vector<double>& x,
                    const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& names, const std::string& title,
                    const std::string& x_label, const std::string& y_label);
// Overlay variant: series i is the polyline (xs[i], series[i]).
PlotSpec make_multi_curve(const std::vector<std::vector<double>>& xs,
                          const std::vector<std::vector<double>>& series,
                          const std::vector<std::string>& names,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label);

// Pure renderers: output bytes depend only on the PlotSpec argument.
std::string render_svg(const PlotSpec& spec);
std::string to_csv(const PlotSpec& spec);

// Convenience writers (binio::write_file under the hood).
void write_svg(const PlotSpec& spec, const std::string& path);
void write_csv(const PlotSpec& spec, const std::string& path);

// One line per qubit, fixed column alignment:
//   q0: |0>--[H]--[M]
std::string circuit_ascii(const qsim::CircuitSpec& circuit);

// 28x28 8-bit binary PGM from one image row in [-1, 1] (tanh range); values
// are mapped back to 0..255, clamped and rounded.
std::string pgm_bytes(const std::vector<float>& pixels);
void write_pgm(const std::vector<float>& pixels, const std::string& path);

}  // namespace hqcgan::viz
