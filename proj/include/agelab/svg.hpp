#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace agelab::svg {

struct Series {
  std::string x_column;
  std::string y_column;
  std::string label;  // legend text; y_column when empty
};

struct PlotSpec {
  std::vector<Series> series;
  int smoothing_window = 1;  // trailing moving average over y
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 960;
  int height = 540;
};

// Trailing moving average; NaN until the window fills, so a unit step widens
// into a ramp exactly `window` samples long. window = 1 is the identity.
std::vector<double> smooth(const std::vector<double>& values, int window);

// Line chart over columns of a CSV file. Deterministic: the same input file
// and spec produce byte-identical output. Throws std::invalid_argument on a
// missing column or when nothing is plottable.
void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec,
               const std::filesystem::path& out_path);

}  // namespace agelab::svg
