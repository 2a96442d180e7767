#pragma once

#include <vector>

#include "msll/linalg.hpp"
#include "msll/model.hpp"

namespace msll {

struct IntegratorOptions {
  double rel_tol = 1e-3;
  double abs_tol = 1e-6;
  // Zero means "derive from the segment length": h_max = len,
  // h_min = 1e-10*len, h_init = len/100.
  double h_max = 0.0;
  double h_min = 0.0;
  double h_init = 0.0;
  long max_steps = 100000;
};

struct SegmentGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<double> nodes;
  std::vector<double> required_times;
};

// State and sensitivity trajectory over one shooting segment. Entry n of each
// vector belongs to grid.nodes[n]. Ys is the derivative of y with respect to
// the segment's initial state, Yp with respect to the parameters.
struct SegmentSolution {
  SegmentGrid grid;
  std::vector<Vector> y;
  std::vector<Matrix> Ys;
  std::vector<Matrix> Yp;
};

struct LlStepResult {
  Vector y;
  Matrix Ys;
  Matrix Yp;
};

// Augmented matrix whose exponential yields one local linearization step:
// first block row [df_dx, df_dp, df_dt, f], a lone 1 coupling the last two
// auxiliary columns, zeros elsewhere. Size (d+p+2) square.
Matrix build_augmented_matrix(const OdeModel& model, double t, const Vector& y,
                              const Vector& p);

// One step of size h: with E = expm(h*C), the first d rows give E11 (columns
// of the state block), E12 (parameter block) and E14 (last column), and
//   y'  = y + E14,  Ys' = E11*Ys,  Yp' = E11*Yp + E12.
// A single expm call advances state and both sensitivities.
LlStepResult ll_step(const OdeModel& model, double t_n, double h,
                     const Vector& y_n, const Matrix& Ys_n, const Matrix& Yp_n,
                     const Vector& p);

// Adaptive integration of one segment. Step doubling controls the local
// error: a full step is compared against two half steps, the scaled max norm
// err = max_i |y_full_i - y_half_i| / (abs_tol + rel_tol*|y_n,i|) must be at
// most 1, and h is rescaled by min(5, max(0.2, 0.9*err^(-1/2))). Steps
// truncated to land on a required time keep the step-size memory untouched.
// Every required_time becomes a grid node. Throws BlowUpError when h
// underflows h_min (the trajectory is escaping), BudgetError past max_steps.
SegmentSolution integrate_segment(const OdeModel& model, const Vector& s_k,
                                  const Vector& p, double t_start, double t_end,
                                  const std::vector<double>& required_times,
                                  const IntegratorOptions& opts = {});

}  // namespace msll
