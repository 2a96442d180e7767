#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msll/shooting.hpp"

namespace msll {

struct OptimizerOptions {
  double eps_stop = 1e-4;   // stop when |q_next - q| <= eps_stop
  double eta = 1.0;         // damping aggressiveness, in (0, 2]
  double alpha_min = 1e-4;  // line-search floor
  int max_iter = 50;
};

enum class EstimateStatus {
  converged,
  max_iterations,
  line_search_failed,
  blow_up,
  rank_deficient,
};

std::string to_string(EstimateStatus s);

// One accepted Gauss-Newton step. level is the natural level value at the
// accepted trial point under the Jacobian frozen at the pre-step iterate; the
// level at the iterate itself is dq_norm^2/2, so descent means
// level <= dq_norm^2/2.
struct IterationRecord {
  int iter = 0;  // 1-based
  AugmentedParams q;
  double alpha = 0.0;
  double w = 0.0;
  double level = 0.0;
  double dq_norm = 0.0;
  double sigma = 0.0;
};

struct EstimationReport {
  bool converged = false;
  EstimateStatus status = EstimateStatus::max_iterations;
  std::vector<IterationRecord> iterations;
  AugmentedParams q_final;
  double sigma_final = 0.0;
  std::string failure_reason;
};

// Image of the trial-point residuals under the generalized inverse frozen at
// the current iterate: fresh residuals, old Jacobian blocks, one mixed
// condense/solve/expand pass, returning r with natural level L = |r|^2/2.
// Sign convention: at the iterate itself r = -dq. Throws BlowUpError when the
// trial point cannot be integrated.
Vector natural_level_residual(const OdeModel& model, const Dataset& dataset,
                              const ShootingConfig& config,
                              const AugmentedParams& q_trial, double sigma,
                              const LinearizedSystem& jac_at,
                              const IntegratorOptions& opts = {});

// Nonlinearity estimate w = 2|r_trial + (1-alpha) dq| / |alpha dq|^2; exactly
// zero for affine residuals. Throws on |dq| = 0.
double estimate_w(double alpha, const Vector& dq, const Vector& r_trial);

struct LineSearchResult {
  bool success = false;
  double alpha = 0.0;  // accepted, or last tried on failure
  double w = 0.0;      // nonlinearity estimate at the accepted trial
  double level = 0.0;  // natural level at the accepted trial
  Vector r;
  int trials = 0;
};

// Maps alpha to the natural-level residual r at q + alpha*dq, or nullopt when
// the trial blows up (treated as an infinite level).
using TrialEvaluator = std::function<std::optional<Vector>(double alpha)>;

// Damping-factor search: predictor alpha = min(1, eta/(w_prev |dq|)) (full
// step when w_prev = 0), accepted when the natural level does not increase,
// corrected via the w estimate at the failed trial otherwise, halving at
// least. Fails when alpha would drop below alpha_min.
LineSearchResult line_search(const Vector& dq, double w_prev,
                             const TrialEvaluator& residual_at,
                             const OptimizerOptions& opts);

// sqrt(sum of squared observation residuals / (N*v - p)) at q, from a fresh
// integration. Throws DegreesOfFreedomError when N*v <= p.
double estimate_sigma(const OdeModel& model, const Dataset& dataset,
                      const ShootingConfig& config, const AugmentedParams& q,
                      const IntegratorOptions& opts = {});

// The damped generalized Gauss-Newton loop: assemble, condense/solve/expand,
// line-search, step, update sigma, until |alpha*dq| <= eps_stop or a failure
// status. Never throws for non-convergence, blow-up, failed line search or
// rank deficiency; those become report statuses.
EstimationReport estimate(const OdeModel& model, const Dataset& dataset,
                          const ShootingConfig& config,
                          const AugmentedParams& q0, double sigma0,
                          const OptimizerOptions& opts = {},
                          const IntegratorOptions& integ = {});

}  // namespace msll
