#include "hqcgan/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hqcgan/binio.hpp"
#include "hqcgan/dataset.hpp"

namespace hqcgan::viz {
namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

// Diverging blue-white-red fill for signed heat values, t in [-1, 1].
std::string diverge_color(double t) {
  const int neg[3] = {33, 102, 172}, mid[3] = {255, 255, 255}, pos[3] = {178, 24, 43};
  const int* target = t < 0 ? neg : pos;
  const double a = std::min(1.0, std::abs(t));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)",
                static_cast<int>(std::lround(mid[0] + (target[0] - mid[0]) * a)),
                static_cast<int>(std::lround(mid[1] + (target[1] - mid[1]) * a)),
                static_cast<int>(std::lround(mid[2] + (target[2] - mid[2]) * a)));
  return buf;
}

struct Svg {
  std::string body;
  double width = 0.0, height = 0.0;

  void open(double w, double h) {
    width = w;
    height = h;
    body = "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fmt6(w) + "\" height=\"" + fmt6(h) + "\" viewBox=\"0 0 " + fmt6(w) + " " +
           fmt6(h) + "\">\n";
    rect(0, 0, w, h, "#ffffff", "none");
  }
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke) {
    body += "<rect x=\"" + fmt6(x) + "\" y=\"" + fmt6(y) + "\" width=\"" + fmt6(w) +
            "\" height=\"" + fmt6(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
            "\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double sw = 1.0) {
    body += "<line x1=\"" + fmt6(x1) + "\" y1=\"" + fmt6(y1) + "\" x2=\"" + fmt6(x2) +
            "\" y2=\"" + fmt6(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
            fmt6(sw) + "\"/>\n";
  }
  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke) {
    body += "<circle cx=\"" + fmt6(cx) + "\" cy=\"" + fmt6(cy) + "\" r=\"" + fmt6(r) +
            "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
  }
  void text(double x, double y, const std::string& s, double size,
            const std::string& anchor, const std::string& fill = "#000000",
            const std::string& transform = "") {
    body += "<text x=\"" + fmt6(x) + "\" y=\"" + fmt6(y) + "\" font-size=\"" +
            fmt6(size) + "\" font-family=\"monospace\" text-anchor=\"" + anchor +
            "\" fill=\"" + fill + "\"";
    if (!transform.empty()) body += " transform=\"" + transform + "\"";
    body += ">" + xml_escape(s) + "</text>\n";
  }
  void polyline(const std::string& points, const std::string& stroke) {
    body += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + stroke +
            "\" stroke-width=\"1.500000\"/>\n";
  }
  std::string close() { return body + "</svg>\n"; }
};

struct Range {
  double lo, hi;
  double span() const { return hi - lo; }
};

Range padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

struct Frame {
  double left, top, w, h;  // plot area in canvas coordinates
  Range xr, yr;

  double px(double x) const { return left + (x - xr.lo) / xr.span() * w; }
  double py(double y) const { return top + h - (y - yr.lo) / yr.span() * h; }
};

void draw_axes(Svg& svg, const Frame& f, const std::string& x_label,
               const std::string& y_label) {
  svg.line(f.left, f.top + f.h, f.left + f.w, f.top + f.h, "#000000");
  svg.line(f.left, f.top, f.left, f.top + f.h, "#000000");
  for (int t = 0; t <= 4; ++t) {
    const double fx = f.xr.lo + f.xr.span() * t / 4.0;
    const double fy = f.yr.lo + f.yr.span() * t / 4.0;
    svg.line(f.px(fx), f.top + f.h, f.px(fx), f.top + f.h + 4, "#000000");
    svg.text(f.px(fx), f.top + f.h + 16, fmt6(fx), 9, "middle");
    svg.line(f.left - 4, f.py(fy), f.left, f.py(fy), "#000000");
    svg.text(f.left - 6, f.py(fy) + 3, fmt6(fy), 9, "end");
  }
  if (!x_label.empty())
    svg.text(f.left + f.w / 2, f.top + f.h + 34, x_label, 11, "middle");
  if (!y_label.empty())
    svg.text(16, f.top + f.h / 2, y_label, 11, "middle",
             "#000000", "rotate(-90.000000 16.000000 " + fmt6(f.top + f.h / 2) + ")");
}

// x values for series s, honouring the per-series-x overlay form.
const std::vector<double>& series_x(const PlotSpec& spec, std::size_t s) {
  return spec.curve_xs.empty() ? spec.curve_x : spec.curve_xs[s];
}

std::string render_curve(const PlotSpec& spec) {
  Svg svg;
  svg.open(720, 480);
  svg.text(360, 24, spec.title, 14, "middle");

  double xlo = series_x(spec, 0).front(), xhi = xlo;
  double ylo = spec.curve_ys[0][0], yhi = ylo;
  for (std::size_t s = 0; s < spec.curve_ys.size(); ++s) {
    for (double x : series_x(spec, s)) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
    }
    for (double y : spec.curve_ys[s]) {
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  Frame f{70, 40, 720 - 70 - 140, 480 - 40 - 56, padded_range(xlo, xhi),
          padded_range(ylo, yhi)};
  draw_axes(svg, f, spec.x_label, spec.y_label);

  for (std::size_t s = 0; s < spec.curve_ys.size(); ++s) {
    const std::string color = kPalette[s % kPaletteSize];
    const auto& xs = series_x(spec, s);
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) points += ' ';
      points += fmt6(f.px(xs[i])) + "," + fmt6(f.py(spec.curve_ys[s][i]));
    }
    svg.polyline(points, color);
    if (xs.size() <= 64)
      for (std::size_t i = 0; i < xs.size(); ++i)
        svg.circle(f.px(xs[i]), f.py(spec.curve_ys[s][i]), 2.5, color, "none");
    svg.line(f.left + f.w + 8, 48.0 + 16.0 * static_cast<double>(s), f.left + f.w + 28,
             48.0 + 16.0 * static_cast<double>(s), color, 2.0);
    svg.text(f.left + f.w + 32, 51.0 + 16.0 * static_cast<double>(s),
             spec.series_names[s], 10, "start");
  }
  return svg.close();
}

std::string render_bars(const PlotSpec& spec) {
  Svg svg;
  svg.open(720, 480);
  svg.text(360, 24, spec.title, 14, "middle");

  const std::size_t n = spec.bar_values.size();
  double ylo = 0.0, yhi = 0.0;
  for (double v : spec.bar_values) {
    ylo = std::min(ylo, v);
    yhi = std::max(yhi, v);
  }
  if (spec.kind == PlotSpec::Kind::pauli_bars) {
    ylo = -1.0;
    yhi = 1.0;
  } else {
    yhi = yhi > 0 ? yhi * 1.05 : 1.0;
  }
  Frame f{70, 40, 720 - 70 - 30, 480 - 40 - 70, {0.0, static_cast<double>(n)},
          {ylo, yhi}};

  svg.line(f.left, f.top + f.h, f.left + f.w, f.top + f.h, "#000000");
  svg.line(f.left, f.top, f.left, f.top + f.h, "#000000");
  for (int t = 0; t <= 4; ++t) {
    const double fy = f.yr.lo + f.yr.span() * t / 4.0;
    svg.line(f.left - 4, f.py(fy), f.left, f.py(fy), "#000000");
    svg.text(f.left - 6, f.py(fy) + 3, fmt6(fy), 9, "end");
  }
  const double zero_y = f.py(0.0);
  if (ylo < 0.0) svg.line(f.left, zero_y, f.left + f.w, zero_y, "#888888");

  const double slot = f.w / static_cast<double>(n);
  const std::size_t label_step = n <= 16 ? 1 : (n + 15) / 16;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = spec.bar_values[i];
    const double x = f.left + slot * (static_cast<double>(i) + 0.1);
    const double top = std::min(f.py(v), zero_y);
    const double height = std::abs(f.py(v) - zero_y);
    const std::string fill = v < 0 ? "#d62728" : "#1f77b4";
    svg.rect(x, top, slot * 0.8, height, fill, "none");
    if (i % label_step == 0) {
      const double cx = x + slot * 0.4;
      svg.text(cx, f.top + f.h + 12, spec.bar_labels[i], 8, "end", "#000000",
               "rotate(-60.000000 " + fmt6(cx) + " " + fmt6(f.top + f.h + 12) + ")");
    }
  }
  if (!spec.x_label.empty())
    svg.text(f.left + f.w / 2, 474, spec.x_label, 11, "middle");
  if (!spec.y_label.empty())
    svg.text(16, f.top + f.h / 2, spec.y_label, 11, "middle", "#000000",
             "rotate(-90.000000 16.000000 " + fmt6(f.top + f.h / 2) + ")");
  return svg.close();
}

std::string render_bloch(const PlotSpec& spec) {
  const std::size_t n = spec.bloch.size();
  const std::size_t cols = std::min<std::size_t>(n, 4);
  const std::size_t rows = (n + cols - 1) / cols;
  const double panel = 150.0;
  Svg svg;
  svg.open(40 + panel * static_cast<double>(cols),
           70 + panel * static_cast<double>(rows));
  svg.text(svg.width / 2, 24, spec.title, 14, "middle");
  svg.text(svg.width / 2, 40, "disk: x-z projection; caption lists (x, y, z)", 9,
           "middle", "#555555");

  for (std::size_t q = 0; q < n; ++q) {
    const double cx = 20 + panel * static_cast<double>(q % cols) + panel / 2;
    const double cy = 50 + panel * static_cast<double>(q / cols) + panel / 2 - 10;
    const double r = 50.0;
    svg.circle(cx, cy, r, "none", "#000000");
    svg.line(cx - r, cy, cx + r, cy, "#cccccc", 0.5);
    svg.line(cx, cy - r, cx, cy + r, "#cccccc", 0.5);
    const auto& v = spec.bloch[q];
    const double tipx = cx + v[0] * r, tipy = cy - v[2] * r;
    svg.line(cx, cy, tipx, tipy, "#d62728", 2.0);
    svg.circle(tipx, tipy, 3.0, "#d62728", "none");
    svg.text(cx, cy + r + 16,
             "q" + std::to_string(q) + ": (" + fmt6(v[0]) + ", " + fmt6(v[1]) + ", " +
                 fmt6(v[2]) + ")",
             8, "middle");
  }
  return svg.close();
}

std::string render_cityscape(const PlotSpec& spec) {
  const std::size_t dim = spec.heat.rows;
  const double cell = std::clamp(480.0 / static_cast<double>(dim), 4.0, 60.0);
  const double left = 70.0, top = 60.0;
  Svg svg;
  svg.open(left + cell * static_cast<double>(dim) + 30,
           top + cell * static_cast<double>(dim) + 30);
  svg.text(svg.width / 2, 24, spec.title, 14, "middle");

  double vmax = 1e-12;
  for (double v : spec.heat.data) vmax = std::max(vmax, std::abs(v));
  const bool cell_labels = dim <= 16;
  const std::size_t label_step = dim <= 16 ? 1 : (dim + 15) / 16;

  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = spec.heat(i, j);
      const double x = left + cell * static_cast<double>(j);
      const double y = top + cell * static_cast<double>(i);
      svg.rect(x, y, cell, cell, diverge_color(v / vmax), "#dddddd");
      if (cell_labels)
        svg.text(x + cell / 2, y + cell / 2 + 2.5, fmt6(v), 7, "middle");
    }
    if (i % label_step == 0)
      svg.text(left - 4, top + cell * (static_cast<double>(i) + 0.5) + 3,
               spec.heat_labels[i], 9, "end");
  }
  for (std::size_t j = 0; j < dim; j += label_step)
    svg.text(left + cell * (static_cast<double>(j) + 0.5), top - 6,
             spec.heat_labels[j], 9, "middle");
  svg.text(svg.width / 2, svg.height - 8,
           "scale: max |value| = " + fmt6(vmax), 9, "middle", "#555555");
  return svg.close();
}

}  // namespace

void PlotSpec::validate() const {
  switch (kind) {
    case Kind::cityscape: {
      if (heat.rows == 0 || heat.rows != heat.cols)
        throw std::invalid_argument("PlotSpec: cityscape payload must be square");
      if (heat_labels.size() != heat.rows)
        throw std::invalid_argument("PlotSpec: cityscape needs one label per basis state");
      if (!linalg::all_finite(heat))
        throw std::invalid_argument("PlotSpec: cityscape payload must be finite");
      break;
    }
    case Kind::pauli_bars:
    case Kind::histogram: {
      if (bar_values.empty() || bar_labels.size() != bar_values.size())
        throw std::invalid_argument("PlotSpec: bar labels and values must match");
      for (double v : bar_values) {
        if (!std::isfinite(v))
          throw std::invalid_argument("PlotSpec: bar values must be finite");
        if (kind == Kind::histogram && v < 0.0)
          throw std::invalid_argument("PlotSpec: histogram frequencies must be >= 0");
      }
      break;
    }
    case Kind::bloch: {
      if (bloch.empty()) throw std::invalid_argument("PlotSpec: bloch payload empty");
      for (const auto& v : bloch) {
        const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (!(norm <= 1.0 + 1e-9))
          throw std::invalid_argument("PlotSpec: bloch vector norm " + fmt17(norm) +
                                      " exceeds 1");
      }
      break;
    }
    case Kind::curve: {
      if (curve_ys.empty() || series_names.size() != curve_ys.size())
        throw std::invalid_argument("PlotSpec: curve series and names must match");
      if (curve_xs.empty()) {
        if (curve_x.empty())
          throw std::invalid_argument("PlotSpec: curve needs x values");
        for (const auto& series : curve_ys)
          if (series.size() != curve_x.size())
            throw std::invalid_argument("PlotSpec: curve series length mismatch");
      } else {
        if (curve_xs.size() != curve_ys.size())
          throw std::invalid_argument("PlotSpec: per-series x count mismatch");
        for (std::size_t s = 0; s < curve_ys.size(); ++s) {
          if (curve_xs[s].empty())
            throw std::invalid_argument("PlotSpec: curve series " + std::to_string(s) +
                                        " has no x values");
          if (curve_xs[s].size() != curve_ys[s].size())
            throw std::invalid_argument("PlotSpec: curve series length mismatch");
        }
      }
      break;
    }
  }
}

PlotSpec make_cityscape(const qsim::DensityMatrix& rho, MatrixPart part,
                        const std::string& title) {
  const auto data = qsim::cityscape_export(rho);
  PlotSpec spec;
  spec.kind = PlotSpec::Kind::cityscape;
  spec.title = title;
  spec.heat = part == MatrixPart::real ? data.re : data.im;
  spec.heat_labels = data.labels;
  spec.validate();
  return spec;
}

PlotSpec make_pauli_bars(const std::map<std::string, double>& expectations,
                         const std::string& title) {
  PlotSpec spec;
  spec.kind = PlotSpec::Kind::pauli_bars;
  spec.title = title;
  spec.x_label = "Pauli string";
  spec.y_label = "expectation";
  for (const auto& [label, value] : expectations) {
    spec.bar_labels.push_back(label);
    spec.bar_values.push_back(value);
  }
  spec.validate();
  return spec;
}

PlotSpec make_bloch(const std::vector<std::array<double, 3>>& vectors,
                    const std::string& title) {
  PlotSpec spec;
  spec.kind = PlotSpec::Kind::bloch;
  spec.title = title;
  spec.bloch = vectors;
  spec.validate();
  return spec;
}

PlotSpec make_histogram(const qsim::OutcomeHistogram& hist, const std::string& title) {
  if (hist.total_shots == 0)
    throw std::invalid_argument("make_histogram: histogram has no shots");
  PlotSpec spec;
  spec.kind = PlotSpec::Kind::histogram;
  spec.title = title;
  spec.x_label = "outcome";
  spec.y_label = "frequency";
  // Every basis state appears, including zero-count ones, in index order.
  const std::size_t dim = std::size_t{1} << hist.n_qubits;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string label = qsim::bitstring_of(i, hist.n_qubits);
    const auto it = hist.counts.find(label);
    const double count = it == hist.counts.end() ? 0.0 : static_cast<double>(it->second);
    spec.bar_labels.push_back(label);
    spec.bar_values.push_back(count / static_cast<double>(hist.total_shots));
  }
  spec.validate();
  return spec;
}

PlotSpec make_curve(const std::vector<double>& x,
                    const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& names, const std::string& title,
                    const std::string& x_label, const std::string& y_label) {
  PlotSpec spec;
  spec.kind = PlotSpec::Kind::curve;
  spec.title = title;
  spec.x_label = x_label;
  spec.y_label = y_label;
  spec.curve_x = x;
  spec.curve_ys = series;
  spec.series_names = names;
  spec.validate();
  return spec;
}

PlotSpec make_multi_curve(const std::vector<std::vector<double>>& xs,
                          const std::vector<std::vector<double>>& series,
                          const std::vector<std::string>& names,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  PlotSpec spec;
  spec.kind = PlotSpec::Kind::curve;
  spec.title = title;
  spec.x_label = x_label;
  spec.y_label = y_label;
  spec.curve_xs = xs;
  spec.curve_ys = series;
  spec.series_names = names;
  spec.validate();
  return spec;
}

std::string render_svg(const PlotSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PlotSpec::Kind::curve: return render_curve(spec);
    case PlotSpec::Kind::pauli_bars:
    case PlotSpec::Kind::histogram: return render_bars(spec);
    case PlotSpec::Kind::bloch: return render_bloch(spec);
    case PlotSpec::Kind::cityscape: return render_cityscape(spec);
  }
  throw std::invalid_argument("render_svg: unknown plot kind");
}

std::string to_csv(const PlotSpec& spec) {
  spec.validate();
  std::string out;
  switch (spec.kind) {
    case PlotSpec::Kind::cityscape: {
      out += "# basis-state labels are bitstrings, most-significant qubit first\n";
      out += "row,col,value\n";
      for (std::size_t i = 0; i < spec.heat.rows; ++i)
        for (std::size_t j = 0; j < spec.heat.cols; ++j)
          out += csv_field(spec.heat_labels[i]) + "," + csv_field(spec.heat_labels[j]) +
                 "," + fmt17(spec.heat(i, j)) + "\n";
      break;
    }
    case PlotSpec::Kind::pauli_bars: {
      out += "# pauli-string characters follow most-significant-qubit-first order\n";
      out += "pauli,expectation\n";
      for (std::size_t i = 0; i < spec.bar_values.size(); ++i)
        out += csv_field(spec.bar_labels[i]) + "," + fmt17(spec.bar_values[i]) + "\n";
      break;
    }
    case PlotSpec::Kind::histogram: {
      out += "# bitstrings are most-significant-qubit-first\n";
      out += "bitstring,frequency\n";
      for (std::size_t i = 0; i < spec.bar_values.size(); ++i)
        out += csv_field(spec.bar_labels[i]) + "," + fmt17(spec.bar_values[i]) + "\n";
      break;
    }
    case PlotSpec::Kind::bloch: {
      out += "qubit,x,y,z\n";
      for (std::size_t q = 0; q < spec.bloch.size(); ++q)
        out += std::to_string(q) + "," + fmt17(spec.bloch[q][0]) + "," +
               fmt17(spec.bloch[q][1]) + "," + fmt17(spec.bloch[q][2]) + "\n";
      break;
    }
    case PlotSpec::Kind::curve: {
      if (spec.curve_xs.empty()) {
        out += "x";
        for (const auto& name : spec.series_names) out += "," + csv_field(name);
        out += "\n";
        for (std::size_t i = 0; i < spec.curve_x.size(); ++i) {
          out += fmt17(spec.curve_x[i]);
          for (const auto& series : spec.curve_ys) out += "," + fmt17(series[i]);
          out += "\n";
        }
      } else {
        // Per-series grids: long format, one (series, x, y) row per point.
        out += "series,x,y\n";
        for (std::size_t s = 0; s < spec.curve_ys.size(); ++s)
          for (std::size_t i = 0; i < spec.curve_xs[s].size(); ++i)
            out += csv_field(spec.series_names[s]) + "," + fmt17(spec.curve_xs[s][i]) +
                   "," + fmt17(spec.curve_ys[s][i]) + "\n";
      }
      break;
    }
  }
  return out;
}

void write_svg(const PlotSpec& spec, const std::string& path) {
  binio::write_file(path, render_svg(spec));
}

void write_csv(const PlotSpec& spec, const std::string& path) {
  binio::write_file(path, to_csv(spec));
}

std::string circuit_ascii(const qsim::CircuitSpec& circuit) {
  circuit.validate();
  const int width = static_cast<int>(std::to_string(circuit.n_qubits - 1).size());
  std::string out;
  for (int q = 0; q < circuit.n_qubits; ++q) {
    char head[32];
    std::snprintf(head, sizeof(head), "q%-*d: ", width, q);
    out += head;
    out += "|0>--[H]--[M]\n";
  }
  return out;
}

std::string pgm_bytes(const std::vector<float>& pixels) {
  if (pixels.size() != dataset::kImageDim)
    throw std::invalid_argument("pgm_bytes: expected " +
                                std::to_string(dataset::kImageDim) + " pixels, got " +
                                std::to_string(pixels.size()));
  std::string out = "P5\n28 28\n255\n";
  for (float v : pixels) {
    if (!std::isfinite(v))
      throw std::invalid_argument("pgm_bytes: non-finite pixel value");
    const double raw = dataset::denormalize_pixel(static_cast<double>(v));
    const long byte = std::lround(std::clamp(raw, 0.0, 255.0));
    out += static_cast<char>(static_cast<unsigned char>(byte));
  }
  return out;
}

void write_pgm(const std::vector<float>& pixels, const std::string& path) {
  binio::write_file(path, pgm_bytes(pixels));
}

}  // namespace hqcgan::viz
