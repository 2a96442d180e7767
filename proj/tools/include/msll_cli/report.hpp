#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msll/linalg.hpp"
#include "msll/optimizer.hpp"

namespace msll::cli {

// One accepted optimizer iteration as serialized in a report file.
struct IterationRow {
  int iter = 0;
  double alpha = 0.0;
  double w = 0.0;
  double level = 0.0;
  double dq_norm = 0.0;
  double sigma = 0.0;
};

// Everything a single estimation run leaves behind. Round trips bit-exactly
// through write_report / read_report.
struct RunReport {
  std::string model;
  int m = 0;
  int batch = 0;
  int realization = 0;
  bool converged = false;
  std::string status;
  int iterations = 0;
  Vector p_hat;
  Vector s0_hat;
  double sigma_hat = 0.0;
  std::string failure_reason;
  std::vector<IterationRow> iters;
};

RunReport make_run_report(const std::string& model, int m, int batch,
                          int realization, const EstimationReport& report);

// Text format:
//   # msll-report v1
//   key = value lines (failure_reason present only when nonempty)
//   # iter alpha w level dq_norm sigma
//   space separated rows at 17 significant digits
void write_report(const std::string& path, const RunReport& report);
RunReport read_report(const std::string& path);

// Protocol identity echoed into the summary header.
struct SummaryMeta {
  std::string model;
  int m = 0;
  int n_obs = 0;
  int batches = 0;
  int realizations = 0;
  std::uint64_t seed = 0;
  double sigma_true = 0.0;
  double scale = 1.0;
};

// Summary text: converged runs are averaged within each batch, batches with
// no converged run are dropped, and the remaining batch means are reduced to
// a mean and sample standard deviation (zero for a single batch, nan when
// nothing converged anywhere). Quantities are p_1..p_P, sigma and the
// accepted-iteration count. Pure function of its arguments, so a summary can
// be recomputed verbatim from the per-run report files.
std::string render_summary(const SummaryMeta& meta,
                           const std::vector<RunReport>& runs);
void write_summary(const std::string& path, const SummaryMeta& meta,
                   const std::vector<RunReport>& runs);

}  // namespace msll::cli
