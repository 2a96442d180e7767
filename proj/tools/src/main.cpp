#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "msll/errors.hpp"
#include "msll_cli/commands.hpp"
#include "msll_cli/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multiple-shooting parameter estimation for ODE models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string dataset_path;
  std::string out_path;
  int jobs = 1;
  std::optional<double> scale;

  auto* simulate =
      app.add_subcommand("simulate", "Generate synthetic datasets");
  simulate->add_option("-c,--config", config_path, "Experiment config file")
      ->required();
  simulate->add_option("-o,--output", out_path, "Output directory")
      ->required();

  auto* estimate =
      app.add_subcommand("estimate", "Fit one dataset and write a report");
  estimate->add_option("-c,--config", config_path, "Experiment config file")
      ->required();
  estimate->add_option("-d,--dataset", dataset_path, "Dataset file")
      ->required();
  estimate->add_option("-o,--output", out_path, "Report file")->required();

  auto* benchmark =
      app.add_subcommand("benchmark", "Run the batch protocol and summarize");
  benchmark->add_option("-c,--config", config_path, "Experiment config file")
      ->required();
  benchmark->add_option("-o,--output", out_path, "Output directory")
      ->required();
  benchmark->add_option("--jobs", jobs, "Concurrent estimation threads");
  benchmark->add_option("--scale", scale,
                        "Override the config's protocol scale factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const msll::cli::ExperimentConfig cfg = msll::cli::parse_config(config_path);
    if (simulate->parsed()) return msll::cli::cmd_simulate(cfg, out_path);
    if (estimate->parsed()) {
      return msll::cli::cmd_estimate(cfg, dataset_path, out_path);
    }
    return msll::cli::cmd_benchmark(cfg, out_path, jobs, scale);
  } catch (const msll::Error& e) {
    std::cerr << "msll: " << e.what() << "\n";
    return 1;
  }
}
