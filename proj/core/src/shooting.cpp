#include "msll/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msll/errors.hpp"

namespace msll {

namespace {

// Nearest value in a sorted list, ties to the earlier entry.
size_t nearest_index(const std::vector<double>& sorted, double x) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  if (it == sorted.begin()) return 0;
  if (it == sorted.end()) return sorted.size() - 1;
  const auto lo = static_cast<size_t>(it - sorted.begin() - 1);
  const auto hi = lo + 1;
  return (x - sorted[lo] <= sorted[hi] - x) ? lo : hi;
}

}  // namespace

Vector flatten(const AugmentedParams& q) {
  const auto np = q.p.size();
  const auto d = q.s.empty() ? 0 : q.s.front().size();
  Vector out(np + static_cast<Eigen::Index>(q.s.size()) * d);
  out.head(np) = q.p;
  for (size_t k = 0; k < q.s.size(); ++k) {
    out.segment(np + static_cast<Eigen::Index>(k) * d, d) = q.s[k];
  }
  return out;
}

AugmentedParams unflatten(const Vector& v, int param_dim, int state_dim,
                          int num_nodes) {
  if (v.size() != param_dim + static_cast<Eigen::Index>(num_nodes) * state_dim) {
    throw DimensionError("unflatten: vector has " + std::to_string(v.size()) +
                         " entries, expected " +
                         std::to_string(param_dim + num_nodes * state_dim));
  }
  AugmentedParams q;
  q.p = v.head(param_dim);
  q.s.reserve(static_cast<size_t>(num_nodes));
  for (int k = 0; k < num_nodes; ++k) {
    q.s.push_back(v.segment(param_dim + k * state_dim, state_dim));
  }
  return q;
}

std::vector<double> choose_node_times(const std::vector<double>& obs_times,
                                      double t0, double t_end, int m) {
  if (!(t0 < t_end)) {
    throw Error("choose_node_times: need t0 < t_end");
  }
  if (m <= 0) return {t0, t_end};

  std::vector<double> nodes{t0};
  nodes.reserve(static_cast<size_t>(m) + 1);
  const double len = t_end - t0;
  for (int k = 1; k < m; ++k) {
    const double target = t0 + len * static_cast<double>(k) / m;
    double cand = target;
    double best_dist = -1.0;
    for (double t : obs_times) {
      if (t <= nodes.back() || t >= t_end) continue;
      const double dist = std::abs(t - target);
      if (best_dist < 0.0 || dist < best_dist) {
        best_dist = dist;
        cand = t;
      }
    }
    if (cand <= nodes.back() || cand >= t_end) {
      // No usable observation time; equispace the remaining stretch.
      cand = nodes.back() +
             (t_end - nodes.back()) / static_cast<double>(m - k + 1);
    }
    nodes.push_back(cand);
  }
  nodes.push_back(t_end);
  return nodes;
}

AugmentedParams initial_guess(const OdeModel& model, const Dataset& dataset,
                              const ShootingConfig& config, const Vector& p0) {
  const int d = model.state_dim;
  const int v = model.obs_dim;

  // Which observation row reads which state component directly: rows of dg_dx
  // that are unit vectors. Probed at a neutral point; exact for the projection
  // maps the built-in models use.
  const Matrix probe = model.dg_dx(config.node_times.front(), Vector::Zero(d),
                                   Vector::Ones(model.param_dim));
  std::vector<std::pair<int, int>> direct;  // (obs row, state index)
  for (int j = 0; j < v; ++j) {
    int nonzero_col = -1;
    bool is_unit = true;
    for (int i = 0; i < d; ++i) {
      if (probe(j, i) == 0.0) continue;
      if (probe(j, i) != 1.0 || nonzero_col >= 0) {
        is_unit = false;
        break;
      }
      nonzero_col = i;
    }
    if (is_unit && nonzero_col >= 0) direct.emplace_back(j, nonzero_col);
  }

  AugmentedParams q;
  q.p = p0;
  q.s.reserve(config.node_times.size());
  for (double tau : config.node_times) {
    Vector s = Vector::Zero(d);
    if (!dataset.times.empty()) {
      const Vector& z = dataset.observations[nearest_index(dataset.times, tau)];
      for (auto [row, col] : direct) s(col) = z(row);
    }
    q.s.push_back(std::move(s));
  }
  if (config.fixed_x0) q.s.front() = *config.fixed_x0;
  return q;
}

LinearizedSystem assemble(const OdeModel& model, const Dataset& dataset,
                          const ShootingConfig& config,
                          const AugmentedParams& q, double sigma,
                          const IntegratorOptions& opts) {
  const int d = model.state_dim;
  const int np = model.param_dim;
  const int v = model.obs_dim;
  const auto& nodes = config.node_times;
  const int m = config.num_segments();
  const auto n_obs = static_cast<int>(dataset.times.size());

  if (m < 1) {
    throw DimensionError("assemble: need at least two shooting nodes");
  }
  if (static_cast<int>(q.s.size()) != m + 1 || q.p.size() != np) {
    throw DimensionError("assemble: iterate does not match grid/model sizes");
  }
  for (double t : dataset.times) {
    if (t < nodes.front() || t > nodes.back()) {
      throw Error("assemble: observation time outside the shooting window");
    }
  }

  const double scale = 1.0 / std::max(sigma, kSigmaScaleFloor);

  LinearizedSystem sys;
  sys.state_dim = d;
  sys.param_dim = np;
  sys.obs_dim = v;
  sys.F1 = Vector::Zero(static_cast<Eigen::Index>(n_obs) * v);
  sys.dF1_ds.assign(static_cast<size_t>(m) + 1,
                    Matrix::Zero(static_cast<Eigen::Index>(n_obs) * v, d));
  sys.dF1_dp = Matrix::Zero(static_cast<Eigen::Index>(n_obs) * v, np);
  sys.c.resize(static_cast<size_t>(m));
  sys.dc_ds.resize(static_cast<size_t>(m));
  sys.dc_dp.resize(static_cast<size_t>(m));

  // Observation index ranges per segment: t_i in [tau_k, tau_{k+1}), with
  // t_i = tau_m attached to the last node directly.
  std::vector<std::vector<int>> seg_obs(static_cast<size_t>(m));
  std::vector<int> end_obs;
  for (int i = 0; i < n_obs; ++i) {
    const double t = dataset.times[static_cast<size_t>(i)];
    if (t == nodes.back()) {
      end_obs.push_back(i);
      continue;
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    const auto k = static_cast<size_t>(it - nodes.begin()) - 1;
    seg_obs[k].push_back(i);
  }

  auto add_observation_rows = [&](int i, double t, const Vector& y,
                                  const Matrix& Ys, const Matrix& Yp, int k) {
    const Vector gi = model.g(t, y, q.p);
    const Matrix dgx = model.dg_dx(t, y, q.p);
    const Matrix dgp = model.dg_dp(t, y, q.p);
    const Eigen::Index row = static_cast<Eigen::Index>(i) * v;
    sys.F1.segment(row, v) =
        scale * (dataset.observations[static_cast<size_t>(i)] - gi);
    sys.dF1_ds[static_cast<size_t>(k)].middleRows(row, v) = -scale * (dgx * Ys);
    sys.dF1_dp.middleRows(row, v) = -scale * (dgx * Yp + dgp);
  };

  for (int k = 0; k < m; ++k) {
    std::vector<double> required;
    required.reserve(seg_obs[static_cast<size_t>(k)].size());
    for (int i : seg_obs[static_cast<size_t>(k)]) {
      required.push_back(dataset.times[static_cast<size_t>(i)]);
    }

    SegmentSolution sol;
    try {
      sol = integrate_segment(model, q.s[static_cast<size_t>(k)], q.p,
                              nodes[static_cast<size_t>(k)],
                              nodes[static_cast<size_t>(k) + 1], required, opts);
    } catch (const BlowUpError& e) {
      throw BlowUpError("assemble: segment " + std::to_string(k) + " over [" +
                            std::to_string(nodes[static_cast<size_t>(k)]) +
                            ", " +
                            std::to_string(nodes[static_cast<size_t>(k) + 1]) +
                            "] failed: " + e.what(),
                        e.time);
    }

    // Landing points are stored bit-exactly, so walk both sorted lists with
    // exact matching.
    size_t node_idx = 0;
    for (int i : seg_obs[static_cast<size_t>(k)]) {
      const double t = dataset.times[static_cast<size_t>(i)];
      while (node_idx < sol.grid.nodes.size() && sol.grid.nodes[node_idx] != t) {
        ++node_idx;
      }
      if (node_idx == sol.grid.nodes.size()) {
        throw Error("assemble: required observation time missing from grid");
      }
      add_observation_rows(i, t, sol.y[node_idx], sol.Ys[node_idx],
                           sol.Yp[node_idx], k);
    }

    sys.c[static_cast<size_t>(k)] =
        sol.y.back() - q.s[static_cast<size_t>(k) + 1];
    sys.dc_ds[static_cast<size_t>(k)] = sol.Ys.back();
    sys.dc_dp[static_cast<size_t>(k)] = sol.Yp.back();
  }

  const Matrix I = Matrix::Identity(d, d);
  const Matrix Z = Matrix::Zero(d, np);
  for (int i : end_obs) {
    add_observation_rows(i, nodes.back(), q.s.back(), I, Z, m);
  }
  return sys;
}

CondensedSystem condense(const LinearizedSystem& sys) {
  const auto m = sys.c.size();
  CondensedSystem cond;
  cond.U1 = sys.F1;
  cond.P1 = sys.dF1_dp;
  cond.S1 = sys.dF1_ds.back();
  for (size_t i = m; i >= 1; --i) {
    cond.U1 += cond.S1 * sys.c[i - 1];
    cond.P1 += cond.S1 * sys.dc_dp[i - 1];
    cond.S1 = sys.dF1_ds[i - 1] + cond.S1 * sys.dc_ds[i - 1];
  }

  if (sys.r2.size() > 0) {
    cond.U2 = sys.r2;
    cond.P2 = sys.dr2_dp;
    cond.S2 = sys.dr2_ds.back();
    for (size_t i = m; i >= 1; --i) {
      cond.U2 += cond.S2 * sys.c[i - 1];
      cond.P2 += cond.S2 * sys.dc_dp[i - 1];
      cond.S2 = sys.dr2_ds[i - 1] + cond.S2 * sys.dc_ds[i - 1];
    }
  } else {
    cond.U2 = Vector(0);
    cond.S2 = Matrix(0, sys.state_dim);
    cond.P2 = Matrix(0, sys.param_dim);
  }
  return cond;
}

CondensedSolution solve_condensed(const CondensedSystem& cond,
                                  bool fixed_x0_active) {
  const Eigen::Index d = cond.S1.cols();
  const Eigen::Index np = cond.P1.cols();
  CondensedSolution sol;
  try {
    if (fixed_x0_active) {
      sol.ds0 = Vector::Zero(d);
      sol.dp = lstsq(cond.P1, -cond.U1);
      return sol;
    }
    Matrix X(cond.S1.rows(), d + np);
    X << cond.S1, cond.P1;
    Vector full;
    if (cond.U2.size() > 0) {
      Matrix A(cond.S2.rows(), d + np);
      A << cond.S2, cond.P2;
      full = constrained_lstsq(X, -cond.U1, A, -cond.U2);
    } else {
      full = lstsq(X, -cond.U1);
    }
    sol.ds0 = full.head(d);
    sol.dp = full.tail(np);
    return sol;
  } catch (const RankDeficiencyError& e) {
    throw RankDeficiencyError(
        std::string("solve_condensed: increment is not identifiable (") +
            e.what() + ")",
        e.rank, e.cols);
  }
}

Vector expand(const LinearizedSystem& sys, const Vector& ds0,
              const Vector& dp) {
  const int d = sys.state_dim;
  const int np = sys.param_dim;
  const auto m = sys.c.size();

  Vector out(np + static_cast<Eigen::Index>(m + 1) * d);
  out.head(np) = dp;
  Vector ds = ds0;
  out.segment(np, d) = ds;
  for (size_t i = 0; i < m; ++i) {
    ds = sys.dc_ds[i] * ds + sys.dc_dp[i] * dp + sys.c[i];
    out.segment(np + static_cast<Eigen::Index>(i + 1) * d, d) = ds;
  }
  return out;
}

Vector gauss_newton_increment(const LinearizedSystem& sys,
                              bool fixed_x0_active) {
  const CondensedSystem cond = condense(sys);
  const CondensedSolution sol = solve_condensed(cond, fixed_x0_active);
  return expand(sys, sol.ds0, sol.dp);
}

}  // namespace msll
