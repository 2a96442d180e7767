#pragma once

#include <optional>
#include <vector>

#include "msll/data_gen.hpp"
#include "msll/ll_integrator.hpp"
#include "msll/linalg.hpp"
#include "msll/model.hpp"

namespace msll {

// Floor applied to sigma before taking 1/sigma in residual scaling, so a zero
// noise estimate (exact fit) cannot poison the next linearization. The
// Gauss-Newton direction is invariant to the scalar scale, so the floor value
// itself is immaterial; it only needs to keep squared residuals finite.
constexpr double kSigmaScaleFloor = 1e-150;

// Shooting grid tau_0 < ... < tau_m over the observation window. fixed_x0, if
// present, pins s_0 to a known initial condition instead of estimating it.
struct ShootingConfig {
  std::vector<double> node_times;
  std::optional<Vector> fixed_x0;

  int num_segments() const { return static_cast<int>(node_times.size()) - 1; }
};

// The optimization variables q = (p, s_0, ..., s_m).
struct AugmentedParams {
  Vector p;
  std::vector<Vector> s;
};

// Layout of the flat vector: p first, then s_0..s_m.
Vector flatten(const AugmentedParams& q);
AugmentedParams unflatten(const Vector& v, int param_dim, int state_dim,
                          int num_nodes);

// Residuals and Jacobian blocks of the linearized multiple-shooting problem at
// one iterate. F1 carries the 1/sigma observation scaling; its s_k and p
// Jacobian blocks carry the matching -1/sigma factor. c_k is the continuity
// gap y(tau_{k+1}; tau_k, s_k, p) - s_{k+1}; its Jacobians are the segment-end
// sensitivities. r2 blocks describe optional equality constraints r2(q) = 0
// and stay empty unless a caller fills them.
struct LinearizedSystem {
  int state_dim = 0;
  int param_dim = 0;
  int obs_dim = 0;

  Vector F1;
  std::vector<Matrix> dF1_ds;  // one N*v x d block per node, sparse by segment
  Matrix dF1_dp;               // N*v x p

  std::vector<Vector> c;       // m continuity residuals, length d each
  std::vector<Matrix> dc_ds;   // dc_k/ds_k, d x d
  std::vector<Matrix> dc_dp;   // dc_k/dp, d x p

  Vector r2;                   // equality constraint residuals (may be empty)
  std::vector<Matrix> dr2_ds;  // one n2 x d block per node
  Matrix dr2_dp;               // n2 x p

  int num_nodes() const { return static_cast<int>(dF1_ds.size()); }
};

// Condensed problem in the variables (ds_0, dp):
//   min |U1 + S1 ds_0 + P1 dp|  subject to  U2 + S2 ds_0 + P2 dp = 0,
// the constraint block being present only when the system carries r2 rows.
struct CondensedSystem {
  Vector U1;
  Matrix S1;  // N*v x d
  Matrix P1;  // N*v x p
  Vector U2;
  Matrix S2;
  Matrix P2;
};

struct CondensedSolution {
  Vector ds0;
  Vector dp;
};

// Shooting nodes for m segments: tau_0 = t0 and tau_m = t_end always; interior
// nodes snap to the observation time nearest each equispaced target (ties to
// the earlier time), falling back to the raw target when no usable observation
// time is left. m = 0 requests the single-segment initial-value formulation
// and yields {t0, t_end}.
std::vector<double> choose_node_times(const std::vector<double>& obs_times,
                                      double t0, double t_end, int m);

// Starting iterate: p = p0; each s_k takes the nearest observation for state
// components that g exposes directly (rows of dg_dx that are unit vectors) and
// zero for the rest. fixed_x0 overrides s_0.
AugmentedParams initial_guess(const OdeModel& model, const Dataset& dataset,
                              const ShootingConfig& config, const Vector& p0);

// Integrates every segment at q and evaluates all residual and Jacobian
// blocks. Observations are attached to segments by t_i in [tau_k, tau_{k+1});
// an observation exactly at tau_m reads s_m directly. Throws BlowUpError when
// a segment cannot be integrated at q (callers treat that as a rejected trial
// point).
LinearizedSystem assemble(const OdeModel& model, const Dataset& dataset,
                          const ShootingConfig& config,
                          const AugmentedParams& q, double sigma,
                          const IntegratorOptions& opts = {});

// Backward recursion eliminating ds_m..ds_1 from the linearized problem.
CondensedSystem condense(const LinearizedSystem& sys);

// Least-squares solve of the condensed problem. With fixed_x0_active, ds_0 is
// pinned to zero and only dp is solved for. With constraint rows present, the
// KKT path is used. Throws RankDeficiencyError when the condensed design
// matrix does not determine the increment (unidentifiable directions).
CondensedSolution solve_condensed(const CondensedSystem& cond,
                                  bool fixed_x0_active);

// Forward recursion ds_{i+1} = (dc_i/ds_i) ds_i + (dc_i/dp) dp + c_i,
// returning the full increment in flat layout (p first).
Vector expand(const LinearizedSystem& sys, const Vector& ds0, const Vector& dp);

// condense + solve_condensed + expand in one call.
Vector gauss_newton_increment(const LinearizedSystem& sys,
                              bool fixed_x0_active);

}  // namespace msll
