#include "msll_cli/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "msll/errors.hpp"
#include "msll/serialize.hpp"

namespace msll::cli {

namespace {

constexpr const char* kReportHeader = "# msll-report v1";
constexpr const char* kIterHeader = "# iter alpha w level dq_norm sigma";

int to_int(const std::string& s, const std::string& ctx) {
  const double x = parse_double(s, ctx);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) {
    throw FormatError(ctx + ": expected an integer, got '" + s + "'");
  }
  return i;
}

// Mean and sample standard deviation of a batch-mean series; one batch has no
// spread by definition, zero batches means the estimate does not exist.
void reduce(const std::vector<double>& xs, double& mean, double& sd) {
  const auto n = xs.size();
  if (n == 0) {
    mean = std::nan("");
    sd = std::nan("");
    return;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / static_cast<double>(n);
  if (n == 1) {
    sd = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace

RunReport make_run_report(const std::string& model, int m, int batch,
                          int realization, const EstimationReport& report) {
  RunReport out;
  out.model = model;
  out.m = m;
  out.batch = batch;
  out.realization = realization;
  out.converged = report.converged;
  out.status = to_string(report.status);
  out.iterations = static_cast<int>(report.iterations.size());
  out.p_hat = report.q_final.p;
  out.s0_hat =
      report.q_final.s.empty() ? Vector(0) : report.q_final.s.front();
  out.sigma_hat = report.sigma_final;
  out.failure_reason = report.failure_reason;
  out.iters.reserve(report.iterations.size());
  for (const auto& rec : report.iterations) {
    out.iters.push_back(
        {rec.iter, rec.alpha, rec.w, rec.level, rec.dq_norm, rec.sigma});
  }
  return out;
}

void write_report(const std::string& path, const RunReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << kReportHeader << "\n";
  out << "model = " << report.model << "\n";
  out << "m = " << report.m << "\n";
  out << "batch = " << report.batch << "\n";
  out << "realization = " << report.realization << "\n";
  out << "converged = " << (report.converged ? 1 : 0) << "\n";
  out << "status = " << report.status << "\n";
  out << "iterations = " << report.iterations << "\n";
  out << "p_hat = " << format_vector(report.p_hat) << "\n";
  out << "s0_hat = " << format_vector(report.s0_hat) << "\n";
  out << "sigma_hat = " << format_double(report.sigma_hat) << "\n";
  if (!report.failure_reason.empty()) {
    out << "failure_reason = " << report.failure_reason << "\n";
  }
  out << kIterHeader << "\n";
  for (const auto& row : report.iters) {
    out << row.iter << " " << format_double(row.alpha) << " "
        << format_double(row.w) << " " << format_double(row.level) << " "
        << format_double(row.dq_norm) << " " << format_double(row.sigma)
        << "\n";
  }
  if (!out) throw IoError("write failed for report '" + path + "'");
}

RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw FormatError(path + ": missing '" + kReportHeader + "' header");
  }

  RunReport report;
  bool in_iters = false;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (line == kIterHeader) {
      in_iters = true;
      continue;
    }
    if (!in_iters) {
      const auto eq = line.find('=');
      if (eq == std::string::npos || eq < 2 || line[eq - 1] != ' ' ||
          eq + 1 >= line.size() || line[eq + 1] != ' ') {
        throw FormatError(where + ": expected 'key = value'");
      }
      const std::string key = line.substr(0, eq - 1);
      // The value is everything after "= ", so free text survives intact.
      const std::string val = line.substr(eq + 2);
      const std::string ctx = where + ": " + key;
      if (key == "model") report.model = val;
      else if (key == "m") report.m = to_int(val, ctx);
      else if (key == "batch") report.batch = to_int(val, ctx);
      else if (key == "realization") report.realization = to_int(val, ctx);
      else if (key == "converged") report.converged = to_int(val, ctx) != 0;
      else if (key == "status") report.status = val;
      else if (key == "iterations") report.iterations = to_int(val, ctx);
      else if (key == "p_hat") report.p_hat = parse_vector(val, ctx);
      else if (key == "s0_hat") report.s0_hat = parse_vector(val, ctx);
      else if (key == "sigma_hat") report.sigma_hat = parse_double(val, ctx);
      else if (key == "failure_reason") report.failure_reason = val;
      else throw FormatError(where + ": unknown key '" + key + "'");
      continue;
    }
    std::istringstream row(line);
    IterationRow it;
    std::string f[6];
    if (!(row >> f[0] >> f[1] >> f[2] >> f[3] >> f[4] >> f[5])) {
      throw FormatError(where + ": expected 6 iteration fields");
    }
    std::string extra;
    if (row >> extra) {
      throw FormatError(where + ": trailing content '" + extra + "'");
    }
    it.iter = to_int(f[0], where);
    it.alpha = parse_double(f[1], where);
    it.w = parse_double(f[2], where);
    it.level = parse_double(f[3], where);
    it.dq_norm = parse_double(f[4], where);
    it.sigma = parse_double(f[5], where);
    report.iters.push_back(it);
  }
  if (!in_iters) {
    throw FormatError(path + ": missing '" + kIterHeader + "' section");
  }
  if (static_cast<int>(report.iters.size()) != report.iterations) {
    throw FormatError(path + ": iteration count " +
                      std::to_string(report.iterations) + " does not match " +
                      std::to_string(report.iters.size()) + " rows");
  }
  return report;
}

std::string render_summary(const SummaryMeta& meta,
                           const std::vector<RunReport>& runs) {
  int total = 0;
  int converged = 0;
  // Batch index -> converged runs only; batches where nothing converged carry
  // no usable estimate and are excluded from the protocol statistics.
  std::map<int, std::vector<const RunReport*>> by_batch;
  std::size_t param_dim = 0;
  for (const auto& run : runs) {
    ++total;
    param_dim = std::max(param_dim, static_cast<std::size_t>(run.p_hat.size()));
    if (!run.converged) continue;
    ++converged;
    by_batch[run.batch].push_back(&run);
  }

  const std::size_t quantities = param_dim + 2;  // p_1..p_P, sigma, iters
  std::vector<std::vector<double>> batch_means(quantities);
  for (const auto& [batch, members] : by_batch) {
    const double n = static_cast<double>(members.size());
    for (std::size_t j = 0; j < param_dim; ++j) {
      double sum = 0.0;
      for (const auto* run : members) sum += run->p_hat(static_cast<int>(j));
      batch_means[j].push_back(sum / n);
    }
    double sigma_sum = 0.0;
    double iter_sum = 0.0;
    for (const auto* run : members) {
      sigma_sum += run->sigma_hat;
      iter_sum += static_cast<double>(run->iterations);
    }
    batch_means[param_dim].push_back(sigma_sum / n);
    batch_means[param_dim + 1].push_back(iter_sum / n);
  }

  const double conv_pct =
      total > 0 ? 100.0 * static_cast<double>(converged) / total : 0.0;

  std::ostringstream out;
  out << "# msll-summary v1\n";
  out << "# model=" << meta.model << " m=" << meta.m << " N=" << meta.n_obs
      << " B=" << meta.batches << " R=" << meta.realizations
      << " seed=" << meta.seed
      << " sigma_true=" << format_double(meta.sigma_true)
      << " scale=" << format_double(meta.scale) << "\n";
  out << "# converged=" << converged << " total=" << total
      << " conv_pct=" << format_double(conv_pct) << "\n";
  out << "quantity,mean,std\n";
  for (std::size_t j = 0; j < quantities; ++j) {
    double mean = 0.0;
    double sd = 0.0;
    reduce(batch_means[j], mean, sd);
    if (j < param_dim) {
      out << "p" << (j + 1);
    } else if (j == param_dim) {
      out << "sigma";
    } else {
      out << "iters";
    }
    out << "," << format_double(mean) << "," << format_double(sd) << "\n";
  }
  return out.str();
}

void write_summary(const std::string& path, const SummaryMeta& meta,
                   const std::vector<RunReport>& runs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write summary '" + path + "'");
  out << render_summary(meta, runs);
  if (!out) throw IoError("write failed for summary '" + path + "'");
}

}  // namespace msll::cli
