#pragma once

#include <cstdint>
#include <string>

#include "msll/ll_integrator.hpp"
#include "msll/linalg.hpp"
#include "msll/optimizer.hpp"

namespace msll::cli {

// A full experiment description: the system, the synthetic-data protocol and
// the estimation settings. Commands validate the subset they actually need,
// so a config used only for estimation can omit the generation keys.
struct ExperimentConfig {
  std::string model;
  double t0 = 0.0;
  double t_end = 0.0;

  Vector x0_true;       // empty until set
  Vector p_true;
  double sigma_true = -1.0;
  int n_obs = 0;

  int m = 0;            // shooting segments; 0 selects the single-segment fit
  Vector p0;
  double sigma0 = 1.0;
  bool fixed_x0 = false;

  int batches = 1;
  int realizations = 1;
  std::uint64_t seed = 1;
  double scale = 1.0;   // multiplies batches and realizations, floored, min 1
  bool emit_truth = false;

  OptimizerOptions optimizer;
  IntegratorOptions integrator;
};

// Flat `key = value` text: one pair per line, '#' starts a comment, blank
// lines ignored, vectors comma separated. Unknown keys are errors (they are
// always typos). Throws FormatError with file:line context, IoError when the
// file cannot be read.
ExperimentConfig parse_config(const std::string& path);

// parse_config applied to text already in memory; name is used in messages.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& name);

}  // namespace msll::cli
