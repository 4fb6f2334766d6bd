#include "agelab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "agelab/csv.hpp"

namespace agelab::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr int kTicks = 5;

std::string num(double v) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string tick_label(double v) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void cover(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finalize() {
    if (lo > hi) throw std::invalid_argument("plot has no finite points");
    if (hi - lo < 1e-12) {
      const double pad = std::max(1.0, std::abs(lo) * 0.1);
      lo -= pad;
      hi += pad;
    }
  }
  double fraction(double v) const { return (v - lo) / (hi - lo); }
};

}  // namespace

std::vector<double> smooth(const std::vector<double>& values, int window) {
  if (window <= 0) throw std::invalid_argument("smoothing window must be positive");
  if (window == 1) return values;
  std::vector<double> out(values.size(), std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int valid = 0;  // NaN inputs poison the window until they roll out
  std::vector<double> ring(static_cast<std::size_t>(window), 0.0);
  std::vector<bool> ring_ok(static_cast<std::size_t>(window), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t slot = i % static_cast<std::size_t>(window);
    if (i >= static_cast<std::size_t>(window) && ring_ok[slot]) {
      sum -= ring[slot];
      --valid;
    }
    const double v = values[i];
    ring[slot] = std::isnan(v) ? 0.0 : v;
    ring_ok[slot] = !std::isnan(v);
    if (ring_ok[slot]) {
      sum += v;
      ++valid;
    }
    if (i + 1 >= static_cast<std::size_t>(window) && valid == window) {
      out[i] = sum / window;
    }
  }
  return out;
}

void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
               const std::filesystem::path& out_path) {
  if (spec.series.empty()) throw std::invalid_argument("plot spec has no series");
  const csv::Table table = csv::read(csv_path);

  struct Prepared {
    std::vector<double> x, y;
    std::string label;
  };
  std::vector<Prepared> prepared;
  Range x_range, y_range;
  for (const Series& series : spec.series) {
    Prepared p;
    p.x = table.numeric_column(series.x_column);
    p.y = smooth(table.numeric_column(series.y_column), spec.smoothing_window);
    p.label = series.label.empty() ? series.y_column : series.label;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (std::isnan(p.x[i]) || std::isnan(p.y[i])) continue;
      x_range.cover(p.x[i]);
      y_range.cover(p.y[i]);
    }
    prepared.push_back(std::move(p));
  }
  x_range.finalize();
  y_range.finalize();

  const double plot_w = spec.width - kMarginLeft - kMarginRight;
  const double plot_h = spec.height - kMarginTop - kMarginBottom;
  const auto px = [&](double x) { return kMarginLeft + x_range.fraction(x) * plot_w; };
  const auto py = [&](double y) {
    return kMarginTop + (1.0 - y_range.fraction(y)) * plot_h;
  };

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path.string());

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    out << "<text x=\"" << num(spec.width / 2.0)
        << "\" y=\"24\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">"
        << escape(spec.title) << "</text>\n";
  }

  // gridlines and tick labels
  for (int t = 0; t < kTicks; ++t) {
    const double fx = x_range.lo + (x_range.hi - x_range.lo) * t / (kTicks - 1);
    const double fy = y_range.lo + (y_range.hi - y_range.lo) * t / (kTicks - 1);
    out << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(kMarginTop) << "\" x2=\""
        << num(px(fx)) << "\" y2=\"" << num(kMarginTop + plot_h)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(py(fy)) << "\" x2=\""
        << num(kMarginLeft + plot_w) << "\" y2=\"" << num(py(fy))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(kMarginTop + plot_h + 18)
        << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">"
        << tick_label(fx) << "</text>\n";
    out << "<text x=\"" << num(kMarginLeft - 8) << "\" y=\"" << num(py(fy) + 4)
        << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">"
        << tick_label(fy) << "</text>\n";
  }

  // axes
  out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kMarginTop + plot_h)
      << "\" x2=\"" << num(kMarginLeft + plot_w) << "\" y2=\"" << num(kMarginTop + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kMarginTop) << "\" x2=\""
      << num(kMarginLeft) << "\" y2=\"" << num(kMarginTop + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  if (!spec.x_label.empty()) {
    out << "<text x=\"" << num(kMarginLeft + plot_w / 2.0) << "\" y=\""
        << num(spec.height - 12.0)
        << "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">"
        << escape(spec.x_label) << "</text>\n";
  }
  if (!spec.y_label.empty()) {
    out << "<text x=\"16\" y=\"" << num(kMarginTop + plot_h / 2.0)
        << "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 16 " << num(kMarginTop + plot_h / 2.0) << ")\">"
        << escape(spec.y_label) << "</text>\n";
  }

  for (std::size_t s = 0; s < prepared.size(); ++s) {
    const Prepared& p = prepared[s];
    const char* color = kPalette[s % kPaletteSize];
    bool open = false;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (std::isnan(p.x[i]) || std::isnan(p.y[i])) {
        if (open) {
          out << "\"/>\n";
          open = false;
        }
        continue;
      }
      if (!open) {
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        open = true;
      } else {
        out << " ";
      }
      out << num(px(p.x[i])) << "," << num(py(p.y[i]));
    }
    if (open) out << "\"/>\n";
  }

  // legend, top-right inside the plot area
  for (std::size_t s = 0; s < prepared.size(); ++s) {
    const double y = kMarginTop + 14.0 + 16.0 * static_cast<double>(s);
    const double x = kMarginLeft + plot_w - 170.0;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y - 4) << "\" x2=\"" << num(x + 22)
        << "\" y2=\"" << num(y - 4) << "\" stroke=\"" << kPalette[s % kPaletteSize]
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(x + 28) << "\" y=\"" << num(y)
        << "\" font-family=\"monospace\" font-size=\"12\">" << escape(prepared[s].label)
        << "</text>\n";
  }

  out << "</svg>\n";
}

}  // namespace agelab::svg
