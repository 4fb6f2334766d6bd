// agelab command line front end: experiment runner, plotter, verifier.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agelab/config.hpp"
#include "agelab/experiments.hpp"
#include "agelab/svg.hpp"
#include "agelab/verify.hpp"

namespace {

using agelab::experiments::Family;

Family family_of(const std::string& config_path) {
  const auto file = agelab::config::parse_file(config_path);
  const auto name = file.get_string("experiment", "name");
  return agelab::experiments::parse_experiment_name(name).family;
}

int run_config(const std::string& config_path) {
  const auto summary = agelab::experiments::run_from_config(config_path);
  std::cout << "experiment: " << summary.experiment << "\n"
            << "output:     " << summary.output_dir.string() << "\n";
  for (const auto& note : summary.notes) std::cout << "  " << note << "\n";
  std::cout << summary.files.size() << " files written\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agelab: adversarially-guided exploration laboratory"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by an INI config");
  run->add_option("config", run_path, "experiment config file")->required();

  std::string plot_csv;
  std::string plot_out;
  std::string x_column = "episode";
  std::vector<std::string> y_columns;
  std::vector<std::string> labels;
  int window = 1;
  std::string title;
  std::string x_label;
  std::string y_label;
  auto* plot = app.add_subcommand("plot", "Render CSV columns as an SVG line chart");
  plot->add_option("csv", plot_csv, "input CSV (with #schema= header)")->required();
  plot->add_option("svg", plot_out, "output SVG path")->required();
  plot->add_option("--x", x_column, "x column (default: episode)");
  plot->add_option("--y", y_columns, "y column; repeat for several series")->required();
  plot->add_option("--label", labels, "legend label per --y (defaults to the column name)");
  plot->add_option("--window", window, "trailing moving-average window (default 1)");
  plot->add_option("--title", title, "chart title");
  plot->add_option("--xlabel", x_label, "x axis label (default: x column)");
  plot->add_option("--ylabel", y_label, "y axis label");

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "Run a tabular attack-probability threshold sweep");
  sweep->add_option("config", sweep_path, "tabular-sweep config file")->required();

  std::string bench_path;
  auto* bench = app.add_subcommand("bench", "Run the resilience benchmark (adversary vs victim)");
  bench->add_option("config", bench_path, "resilience config file")->required();

  auto* verify = app.add_subcommand("verify", "Run the invariant/oracle checks and print a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_config(run_path);

    if (plot->parsed()) {
      agelab::svg::PlotSpec spec;
      for (std::size_t i = 0; i < y_columns.size(); ++i) {
        agelab::svg::Series series;
        series.x_column = x_column;
        series.y_column = y_columns[i];
        if (i < labels.size()) series.label = labels[i];
        spec.series.push_back(series);
      }
      spec.smoothing_window = window;
      spec.title = title;
      spec.x_label = x_label.empty() ? x_column : x_label;
      spec.y_label = y_label;
      agelab::svg::emit_plot(plot_csv, spec, plot_out);
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      if (family_of(sweep_path) != Family::kTabularSweep)
        throw std::invalid_argument("sweep expects a tabular-sweep experiment config");
      return run_config(sweep_path);
    }

    if (bench->parsed()) {
      if (family_of(bench_path) != Family::kResilience)
        throw std::invalid_argument("bench expects a resilience:<victim> experiment config");
      return run_config(bench_path);
    }

    if (verify->parsed()) return agelab::verify::run_all(std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
