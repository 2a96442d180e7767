#include "msll/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "msll/errors.hpp"

namespace msll {

std::string to_string(EstimateStatus s) {
  switch (s) {
    case EstimateStatus::converged: return "converged";
    case EstimateStatus::max_iterations: return "max_iterations";
    case EstimateStatus::line_search_failed: return "line_search_failed";
    case EstimateStatus::blow_up: return "blow_up";
    case EstimateStatus::rank_deficient: return "rank_deficient";
  }
  return "unknown";
}

Vector natural_level_residual(const OdeModel& model, const Dataset& dataset,
                              const ShootingConfig& config,
                              const AugmentedParams& q_trial, double sigma,
                              const LinearizedSystem& jac_at,
                              const IntegratorOptions& opts) {
  if (jac_at.r2.size() > 0) {
    throw Error(
        "natural_level_residual: general equality constraints have no trial "
        "re-evaluation path");
  }
  const LinearizedSystem fresh =
      assemble(model, dataset, config, q_trial, sigma, opts);
  LinearizedSystem mixed = jac_at;
  mixed.F1 = fresh.F1;
  mixed.c = fresh.c;
  return -gauss_newton_increment(mixed, config.fixed_x0.has_value());
}

double estimate_w(double alpha, const Vector& dq, const Vector& r_trial) {
  const double dqn = dq.norm();
  if (!(dqn > 0.0)) {
    throw Error("estimate_w: zero increment, iteration should have stopped");
  }
  return 2.0 * (r_trial + (1.0 - alpha) * dq).norm() / ((alpha * dqn) * (alpha * dqn));
}

LineSearchResult line_search(const Vector& dq, double w_prev,
                             const TrialEvaluator& residual_at,
                             const OptimizerOptions& opts) {
  const double dqn = dq.norm();
  if (!(dqn > 0.0)) {
    throw Error("line_search: zero increment");
  }
  const double level0 = 0.5 * dqn * dqn;

  double alpha = 1.0;
  if (w_prev > 0.0) alpha = std::min(1.0, opts.eta / (w_prev * dqn));
  alpha = std::max(alpha, opts.alpha_min);

  LineSearchResult res;
  while (true) {
    ++res.trials;
    std::optional<Vector> r = residual_at(alpha);
    double alpha_next;
    if (r) {
      const double level = 0.5 * r->squaredNorm();
      const double w_here = estimate_w(alpha, dq, *r);
      if (level <= level0) {
        res.success = true;
        res.alpha = alpha;
        res.w = w_here;
        res.level = level;
        res.r = std::move(*r);
        return res;
      }
      // The corrector is safeguarded to [alpha/10, alpha/2]: a trial far
      // outside the model-trust region yields a w estimate wild enough to
      // jump below alpha_min in one shot even when moderate steps descend.
      alpha_next = w_here > 0.0
                       ? std::clamp(opts.eta / (w_here * dqn), 0.1 * alpha,
                                    0.5 * alpha)
                       : 0.5 * alpha;
    } else {
      // Blow-up at the trial point: infinite level, no w information.
      alpha_next = 0.5 * alpha;
    }
    if (alpha_next < opts.alpha_min) {
      res.alpha = alpha;
      return res;
    }
    alpha = alpha_next;
  }
}

double estimate_sigma(const OdeModel& model, const Dataset& dataset,
                      const ShootingConfig& config, const AugmentedParams& q,
                      const IntegratorOptions& opts) {
  const double dof = static_cast<double>(dataset.times.size()) * model.obs_dim -
                     model.param_dim;
  if (!(dof > 0.0)) {
    throw DegreesOfFreedomError(
        "estimate_sigma: N*v must exceed the parameter count");
  }
  const LinearizedSystem sys = assemble(model, dataset, config, q, 1.0, opts);
  return std::sqrt(sys.F1.squaredNorm() / dof);
}

EstimationReport estimate(const OdeModel& model, const Dataset& dataset,
                          const ShootingConfig& config,
                          const AugmentedParams& q0, double sigma0,
                          const OptimizerOptions& opts,
                          const IntegratorOptions& integ) {
  const int d = model.state_dim;
  const int np = model.param_dim;
  const int num_nodes = static_cast<int>(config.node_times.size());
  const bool fixed = config.fixed_x0.has_value();
  const double dof = static_cast<double>(dataset.times.size()) * model.obs_dim -
                     np;
  if (!(dof > 0.0)) {
    throw DegreesOfFreedomError(
        "estimate: N*v must exceed the parameter count");
  }

  EstimationReport rep;
  AugmentedParams q = q0;
  double sigma = sigma0;
  double w_prev = 0.0;

  for (int l = 1; l <= opts.max_iter; ++l) {
    LinearizedSystem sys;
    try {
      sys = assemble(model, dataset, config, q, sigma, integ);
    } catch (const BlowUpError& e) {
      rep.status = EstimateStatus::blow_up;
      rep.failure_reason = "iteration " + std::to_string(l) +
                           ": current iterate is not integrable (" + e.what() +
                           ")";
      break;
    } catch (const BudgetError& e) {
      rep.status = EstimateStatus::blow_up;
      rep.failure_reason = "iteration " + std::to_string(l) +
                           ": current iterate is not integrable (" + e.what() +
                           ")";
      break;
    }

    Vector dq;
    try {
      dq = gauss_newton_increment(sys, fixed);
    } catch (const RankDeficiencyError& e) {
      rep.status = EstimateStatus::rank_deficient;
      rep.failure_reason =
          "iteration " + std::to_string(l) + ": " + e.what();
      break;
    }

    const double dqn = dq.norm();
    if (!(dqn > 0.0)) {
      rep.iterations.push_back({l, q, 1.0, 0.0, 0.0, 0.0, sigma});
      rep.converged = true;
      rep.status = EstimateStatus::converged;
      break;
    }

    // The most recent evaluator call inside line_search is the accepted trial,
    // so these stashes hold the post-step iterate and its raw residual norm.
    AugmentedParams q_trial;
    double resid_sq = 0.0;
    const Vector q_flat = flatten(q);
    const double sigma_used = std::max(sigma, kSigmaScaleFloor);
    auto evaluator = [&](double alpha) -> std::optional<Vector> {
      AugmentedParams qt =
          unflatten(q_flat + alpha * dq, np, d, num_nodes);
      try {
        const LinearizedSystem fresh =
            assemble(model, dataset, config, qt, sigma, integ);
        LinearizedSystem mixed = sys;
        mixed.F1 = fresh.F1;
        mixed.c = fresh.c;
        const Vector r = -gauss_newton_increment(mixed, fixed);
        q_trial = std::move(qt);
        resid_sq = (sigma_used * fresh.F1).squaredNorm();
        return r;
      } catch (const BlowUpError&) {
        return std::nullopt;
      } catch (const BudgetError&) {
        // A trial that cannot be integrated within the step budget is as
        // unusable as one that escapes; reject it instead of aborting.
        return std::nullopt;
      }
    };

    const LineSearchResult ls = line_search(dq, w_prev, evaluator, opts);
    if (!ls.success) {
      rep.status = EstimateStatus::line_search_failed;
      rep.failure_reason = "iteration " + std::to_string(l) +
                           ": no descent above alpha_min (last alpha " +
                           std::to_string(ls.alpha) + ")";
      break;
    }

    q = q_trial;
    sigma = std::sqrt(resid_sq / dof);
    w_prev = ls.w;
    rep.iterations.push_back({l, q, ls.alpha, ls.w, ls.level, dqn, sigma});

    if (ls.alpha * dqn <= opts.eps_stop) {
      rep.converged = true;
      rep.status = EstimateStatus::converged;
      break;
    }
    if (l == opts.max_iter) rep.status = EstimateStatus::max_iterations;
  }

  if (!rep.converged && rep.failure_reason.empty()) {
    rep.failure_reason = "no convergence within " +
                         std::to_string(opts.max_iter) + " iterations";
  }
  rep.q_final = q;
  rep.sigma_final = sigma;
  return rep;
}

}  // namespace msll
