#include "msll_cli/trajectory.hpp"

#include <algorithm>
#include <fstream>
#include <vector>

#include "msll/errors.hpp"
#include "msll/serialize.hpp"

namespace msll::cli {

namespace {

void write_row(std::ofstream& out, double t, int segment, const Vector& x) {
  out << format_double(t) << "," << segment;
  for (int i = 0; i < x.size(); ++i) out << "," << format_double(x(i));
  out << "\n";
}

}  // namespace

void write_trajectory(const std::string& path, const OdeModel& model,
                      const ShootingConfig& config, const AugmentedParams& q,
                      const IntegratorOptions& opts, int points) {
  const auto& nodes = config.node_times;
  if (nodes.size() < 2 || q.s.size() != nodes.size()) {
    throw DimensionError("trajectory needs one state per shooting node");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trajectory '" + path + "'");

  out << "# t,segment";
  for (int i = 0; i < model.state_dim; ++i) out << ",x" << (i + 1);
  out << "\n";

  const double t0 = nodes.front();
  const double t_end = nodes.back();
  const double dt = (t_end - t0) / std::max(points - 1, 1);

  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k];
    const double b = nodes[k + 1];
    const int segment = static_cast<int>(k);
    write_row(out, a, segment, q.s[k]);

    std::vector<double> interior;
    for (int i = 1; i < points - 1; ++i) {
      const double t = t0 + dt * i;
      if (t > a && t < b) interior.push_back(t);
    }
    try {
      const auto sol =
          integrate_segment(model, q.s[k], q.p, a, b, interior, opts);
      for (std::size_t n = 1; n < sol.grid.nodes.size(); ++n) {
        const double t = sol.grid.nodes[n];
        const bool keep = n + 1 == sol.grid.nodes.size() ||
                          std::binary_search(interior.begin(), interior.end(), t);
        if (keep) write_row(out, t, segment, sol.y[n]);
      }
    } catch (const Error&) {
      // The segment escaped; its start row is all this iterate can show.
    }
  }
  if (!out) throw IoError("write failed for trajectory '" + path + "'");
}

void write_truth(const std::string& path, const ReferenceTrajectory& truth,
                 int max_rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write truth trajectory '" + path + "'");

  const auto& states = truth.node_states();
  const int n = static_cast<int>(states.size());
  const int stride = std::max(1, (n + max_rows - 1) / max_rows);

  out << "# t";
  for (int i = 0; i < states.front().size(); ++i) out << ",x" << (i + 1);
  out << "\n";
  double t_last = truth.t0();
  for (int i = 0; i < n; i += stride) {
    t_last = truth.t0() + truth.step() * i;
    out << format_double(t_last);
    for (int j = 0; j < states[i].size(); ++j) {
      out << "," << format_double(states[i](j));
    }
    out << "\n";
  }
  // The cache grid may stop short of the window end; close it explicitly.
  if (t_last < truth.t_end()) {
    const Vector x_end = truth.state_at(truth.t_end());
    out << format_double(truth.t_end());
    for (int j = 0; j < x_end.size(); ++j) {
      out << "," << format_double(x_end(j));
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for truth trajectory '" + path + "'");
}

}  // namespace msll::cli
