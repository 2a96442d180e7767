#pragma once

#include <optional>
#include <string>

#include "msll_cli/config.hpp"

namespace msll::cli {

// Generates synthetic datasets into out_dir. A single batch and realization
// writes dataset.csv; larger protocols write dataset_b<j>_r<i>.csv. With
// emit_truth set, the reference trajectory lands in truth.csv. Returns 0.
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir);

// Fits one dataset and writes the run report to report_path, plus the
// discontinuous initial iterate and the fitted trajectory next to it as
// <stem>_initial.csv and <stem>_fit.csv. Returns 0 when the optimizer
// converged, 2 otherwise.
int cmd_estimate(const ExperimentConfig& cfg, const std::string& dataset_path,
                 const std::string& report_path);

// Runs the full B x R protocol, estimating realizations on up to `jobs`
// threads. Dataset and report files plus summary.csv are written by the main
// thread, so outputs are byte-identical for any job count. A realization that
// fails only lowers the convergence percentage. Returns 0 when at least one
// realization converged, 2 otherwise.
int cmd_benchmark(const ExperimentConfig& cfg, const std::string& out_dir,
                  int jobs, std::optional<double> scale_override);

}  // namespace msll::cli
