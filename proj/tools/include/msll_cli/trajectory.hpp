#pragma once

#include <string>

#include "msll/data_gen.hpp"
#include "msll/shooting.hpp"

namespace msll::cli {

// Piecewise trajectory of an iterate for plotting: per segment the start node,
// a shared uniform time grid restricted to the segment, and the integrated
// segment end. A segment that blows up contributes just its start row so a
// failed fit still plots. Columns are t, segment, x_1..x_d.
void write_trajectory(const std::string& path, const OdeModel& model,
                      const ShootingConfig& config, const AugmentedParams& q,
                      const IntegratorOptions& opts, int points = 1024);

// Reference trajectory on its own cache grid, thinned to at most max_rows.
// Columns are t, x_1..x_d.
void write_truth(const std::string& path, const ReferenceTrajectory& truth,
                 int max_rows = 4096);

}  // namespace msll::cli
