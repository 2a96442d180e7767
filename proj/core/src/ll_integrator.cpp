#include "msll/ll_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msll/errors.hpp"

namespace msll {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

double step_factor(double err) {
  if (err <= 0.0) return 5.0;
  return std::min(5.0, std::max(0.2, 0.9 / std::sqrt(err)));
}

}  // namespace

Matrix build_augmented_matrix(const OdeModel& model, double t, const Vector& y,
                              const Vector& p) {
  const int d = model.state_dim;
  const int np = model.param_dim;
  if (y.size() != d) {
    throw DimensionError("build_augmented_matrix: state has " +
                         std::to_string(y.size()) + " entries, model expects " +
                         std::to_string(d));
  }
  if (p.size() != np) {
    throw DimensionError("build_augmented_matrix: parameter vector has " +
                         std::to_string(p.size()) + " entries, model expects " +
                         std::to_string(np));
  }

  const Vector fv = model.f(t, y, p);
  const Matrix Jx = model.df_dx(t, y, p);
  const Matrix Jp = model.df_dp(t, y, p);
  const Vector Jt = model.df_dt(t, y, p);
  if (!all_finite(fv) || !all_finite(Jx) || !all_finite(Jp) || !all_finite(Jt)) {
    throw EvaluationError(
        "model evaluation returned non-finite values at t=" + std::to_string(t),
        t);
  }

  const int n = d + np + 2;
  Matrix C = Matrix::Zero(n, n);
  C.topLeftCorner(d, d) = Jx;
  C.block(0, d, d, np) = Jp;
  C.col(d + np).head(d) = Jt;
  C.col(d + np + 1).head(d) = fv;
  C(d + np, d + np + 1) = 1.0;
  return C;
}

LlStepResult ll_step(const OdeModel& model, double t_n, double h,
                     const Vector& y_n, const Matrix& Ys_n, const Matrix& Yp_n,
                     const Vector& p) {
  if (!(h > 0.0)) {
    throw Error("ll_step: step size must be positive, got " + std::to_string(h));
  }
  const int d = model.state_dim;
  const int np = model.param_dim;

  const Matrix C = build_augmented_matrix(model, t_n, y_n, p);
  const Matrix E = expm(h * C);

  const Matrix E11 = E.topLeftCorner(d, d);
  const Matrix E12 = E.block(0, d, d, np);
  const Vector E14 = E.col(d + np + 1).head(d);

  LlStepResult out;
  out.y = y_n + E14;
  out.Ys = E11 * Ys_n;
  out.Yp = E11 * Yp_n + E12;
  if (!all_finite(out.y) || !all_finite(out.Ys) || !all_finite(out.Yp)) {
    throw BlowUpError("ll_step: non-finite result stepping from t=" +
                          std::to_string(t_n) + " with h=" + std::to_string(h),
                      t_n);
  }
  return out;
}

SegmentSolution integrate_segment(const OdeModel& model, const Vector& s_k,
                                  const Vector& p, double t_start, double t_end,
                                  const std::vector<double>& required_times,
                                  const IntegratorOptions& opts) {
  if (!(t_start < t_end)) {
    throw Error("integrate_segment: need t_start < t_end, got [" +
                std::to_string(t_start) + ", " + std::to_string(t_end) + "]");
  }
  const double len = t_end - t_start;
  const double h_max = opts.h_max > 0.0 ? opts.h_max : len;
  const double h_min = opts.h_min > 0.0 ? opts.h_min : 1e-10 * len;
  double h = opts.h_init > 0.0 ? opts.h_init : len / 100.0;
  h = std::clamp(h, h_min, h_max);

  // Interior required times become mandatory landing points, walked in order;
  // t_end is the final landing point.
  std::vector<double> targets(required_times);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  for (double rt : targets) {
    if (rt < t_start || rt > t_end) {
      throw Error("integrate_segment: required time " + std::to_string(rt) +
                  " outside [" + std::to_string(t_start) + ", " +
                  std::to_string(t_end) + "]");
    }
  }
  SegmentSolution sol;
  sol.grid.t_start = t_start;
  sol.grid.t_end = t_end;
  sol.grid.required_times = targets;

  std::erase_if(targets, [&](double rt) { return rt <= t_start || rt >= t_end; });
  targets.push_back(t_end);

  const int d = model.state_dim;
  const int np = model.param_dim;
  double t = t_start;
  Vector y = s_k;
  Matrix Ys = Matrix::Identity(d, d);
  Matrix Yp = Matrix::Zero(d, np);
  sol.grid.nodes.push_back(t);
  sol.y.push_back(y);
  sol.Ys.push_back(Ys);
  sol.Yp.push_back(Yp);

  long steps = 0;
  for (double target : targets) {
    while (t < target) {
      if (++steps > opts.max_steps) {
        throw BudgetError("integrate_segment: exceeded " +
                          std::to_string(opts.max_steps) + " steps near t=" +
                          std::to_string(t));
      }

      // Truncate onto the landing point, also when the leftover gap would be
      // un-steppable (< h_min).
      double h_eff = h;
      bool truncated = false;
      if (t + h_eff >= target || target - (t + h_eff) < h_min) {
        h_eff = target - t;
        truncated = true;
      }

      double err = 0.0;
      LlStepResult full;
      bool trial_ok = true;
      try {
        full = ll_step(model, t, h_eff, y, Ys, Yp, p);
        const LlStepResult h1 = ll_step(model, t, h_eff / 2.0, y, Ys, Yp, p);
        const LlStepResult h2 =
            ll_step(model, t + h_eff / 2.0, h_eff / 2.0, h1.y, h1.Ys, h1.Yp, p);
        err = 0.0;
        for (int i = 0; i < d; ++i) {
          const double scale = opts.abs_tol + opts.rel_tol * std::abs(y(i));
          err = std::max(err, std::abs(full.y(i) - h2.y(i)) / scale);
        }
        if (!std::isfinite(err)) trial_ok = false;
      } catch (const BlowUpError&) {
        trial_ok = false;
      } catch (const EvaluationError&) {
        trial_ok = false;
      }

      if (!trial_ok || err > 1.0) {
        const double factor = trial_ok ? step_factor(err) : 0.2;
        h = h_eff * factor;
        if (h < h_min) {
          throw BlowUpError("integrate_segment: step size underflow at t=" +
                                std::to_string(t) +
                                " (trajectory is blowing up or too stiff)",
                            t);
        }
        continue;
      }

      t = truncated ? target : t + h_eff;
      y = full.y;
      Ys = full.Ys;
      Yp = full.Yp;
      sol.grid.nodes.push_back(t);
      sol.y.push_back(y);
      sol.Ys.push_back(Ys);
      sol.Yp.push_back(Yp);
      if (!truncated) h = std::clamp(h_eff * step_factor(err), h_min, h_max);
    }
  }
  return sol;
}

}  // namespace msll
