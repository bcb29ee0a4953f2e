// minimon: run monitoring-overhead benchmarks and report on the results.
//
//   minimon run    --config suite.json [--out DIR] [--paper-scale]
//   minimon sweep  --config suite.json --depths 2,4,8 [--out DIR] [--paper-scale]
//   minimon report --in DIR
//   minimon plot   --in DIR --out chart.svg

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minimon/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Low-overhead monitoring benchmark harness"};
  app.require_subcommand(1);

  std::string config_file;
  std::string out_dir;
  std::string in_dir;
  std::string svg_path;
  std::vector<std::int64_t> depths;
  bool paper_scale = false;

  auto* run = app.add_subcommand("run", "Run every configuration of a suite");
  run->add_option("--config", config_file, "Suite JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Result directory (default: $MINIMON_OUT, then the suite's output_dir)");
  run->add_flag("--paper-scale", paper_scale, "2 000 000 iterations x 10 runs per configuration");

  auto* sweep = app.add_subcommand("sweep", "Run every configuration at several call depths");
  sweep->add_option("--config", config_file, "Suite JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--depths", depths, "Comma-separated call depths")->delimiter(',');
  sweep->add_option("--out", out_dir, "Result directory (default: $MINIMON_OUT, then the suite's output_dir)");
  sweep->add_flag("--paper-scale", paper_scale, "2 000 000 iterations x 10 runs per configuration");

  auto* report = app.add_subcommand("report", "Summary table, comparisons and summary.csv");
  report->add_option("--in", in_dir, "Result directory")->required();

  auto* plot = app.add_subcommand("plot", "Overhead-vs-depth SVG chart from sweep results");
  plot->add_option("--in", in_dir, "Result directory")->required();
  plot->add_option("--out", svg_path, "SVG output file")->required();

  CLI11_PARSE(app, argc, argv);

  const auto out_flag = out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
  if (run->parsed()) return minimon::cmd_run(config_file, out_flag, paper_scale, std::cout, std::cerr);
  if (sweep->parsed()) return minimon::cmd_sweep(config_file, depths, out_flag, paper_scale, std::cout, std::cerr);
  if (report->parsed()) return minimon::cmd_report(in_dir, std::cout, std::cerr);
  if (plot->parsed()) return minimon::cmd_plot(in_dir, svg_path, std::cout, std::cerr);
  return 1;
}
