#include "msll_cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>
#include <vector>

#include "msll/data_gen.hpp"
#include "msll/errors.hpp"
#include "msll/optimizer.hpp"
#include "msll/shooting.hpp"
#include "msll_cli/report.hpp"
#include "msll_cli/trajectory.hpp"

namespace msll::cli {

namespace {

namespace fs = std::filesystem;

OdeModel checked_model(const ExperimentConfig& cfg, bool need_truth) {
  OdeModel model = model_by_name(cfg.model);
  if (need_truth) {
    if (cfg.x0_true.size() != model.state_dim) {
      throw FormatError("config: x0_true needs " +
                        std::to_string(model.state_dim) + " components");
    }
    if (cfg.p_true.size() != model.param_dim) {
      throw FormatError("config: p_true needs " +
                        std::to_string(model.param_dim) + " components");
    }
    if (cfg.sigma_true < 0.0) {
      throw FormatError("config: sigma_true must be set and >= 0");
    }
    if (cfg.n_obs < 1) {
      throw FormatError("config: N must be >= 1");
    }
  }
  return model;
}

Vector checked_p0(const ExperimentConfig& cfg, const OdeModel& model) {
  if (cfg.p0.size() != model.param_dim) {
    throw FormatError("config: p0 needs " + std::to_string(model.param_dim) +
                      " components");
  }
  return cfg.p0;
}

std::string dataset_name(int batch, int realization) {
  return "dataset_b" + std::to_string(batch) + "_r" +
         std::to_string(realization) + ".csv";
}

std::string report_name(int batch, int realization) {
  return "report_b" + std::to_string(batch) + "_r" +
         std::to_string(realization) + ".txt";
}

// One protocol realization: build the shooting grid for this dataset's times,
// start from the standard initial guess and run the optimizer. Any thrown
// error becomes a failed report so the protocol never aborts.
RunReport run_one(const OdeModel& model, const ExperimentConfig& cfg,
                  const Dataset& ds) {
  try {
    ShootingConfig sc;
    sc.node_times =
        choose_node_times(ds.times, ds.meta.t0, ds.meta.t_end, cfg.m);
    if (cfg.fixed_x0) sc.fixed_x0 = cfg.x0_true;
    const AugmentedParams q0 = initial_guess(model, ds, sc, cfg.p0);
    const EstimationReport rep = estimate(model, ds, sc, q0, cfg.sigma0,
                                          cfg.optimizer, cfg.integrator);
    return make_run_report(cfg.model, cfg.m, ds.meta.batch,
                           ds.meta.realization, rep);
  } catch (const Error& e) {
    RunReport failed;
    failed.model = cfg.model;
    failed.m = cfg.m;
    failed.batch = ds.meta.batch;
    failed.realization = ds.meta.realization;
    failed.converged = false;
    failed.status = "error";
    failed.p_hat = cfg.p0;
    failed.failure_reason = e.what();
    return failed;
  }
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
  const OdeModel model = checked_model(cfg, true);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  const auto batches = batch_generate(
      model, cfg.x0_true, cfg.p_true, cfg.t0, cfg.t_end, cfg.sigma_true,
      cfg.n_obs, cfg.batches, cfg.realizations, cfg.seed);

  if (cfg.batches == 1 && cfg.realizations == 1) {
    write_dataset((dir / "dataset.csv").string(), batches[0][0]);
  } else {
    for (const auto& batch : batches) {
      for (const auto& ds : batch) {
        write_dataset(
            (dir / dataset_name(ds.meta.batch, ds.meta.realization)).string(),
            ds);
      }
    }
  }

  if (cfg.emit_truth) {
    const auto truth =
        simulate_truth(model, cfg.x0_true, cfg.p_true, cfg.t0, cfg.t_end);
    write_truth((dir / "truth.csv").string(), truth);
  }
  return 0;
}

int cmd_estimate(const ExperimentConfig& cfg, const std::string& dataset_path,
                 const std::string& report_path) {
  const OdeModel model = checked_model(cfg, false);
  const Vector p0 = checked_p0(cfg, model);
  const Dataset ds = read_dataset(dataset_path);
  if (!ds.meta.model.empty() && ds.meta.model != cfg.model) {
    throw FormatError("dataset '" + dataset_path + "' was generated from " +
                      ds.meta.model + " but the config selects " + cfg.model);
  }

  // The dataset metadata wins for the observation window; the config values
  // cover legacy files without one.
  const bool meta_window = ds.meta.t_end > ds.meta.t0;
  const double t0 = meta_window ? ds.meta.t0 : cfg.t0;
  const double t_end = meta_window ? ds.meta.t_end : cfg.t_end;

  ShootingConfig sc;
  sc.node_times = choose_node_times(ds.times, t0, t_end, cfg.m);
  if (cfg.fixed_x0) {
    if (ds.meta.x0_true.size() == model.state_dim) {
      sc.fixed_x0 = ds.meta.x0_true;
    } else if (cfg.x0_true.size() == model.state_dim) {
      sc.fixed_x0 = cfg.x0_true;
    } else {
      throw FormatError(
          "fixed_x0 requested but neither the dataset nor the config carries "
          "a full initial state");
    }
  }

  const AugmentedParams q0 = initial_guess(model, ds, sc, p0);
  const EstimationReport rep =
      estimate(model, ds, sc, q0, cfg.sigma0, cfg.optimizer, cfg.integrator);

  const RunReport run = make_run_report(cfg.model, cfg.m, ds.meta.batch,
                                        ds.meta.realization, rep);
  write_report(report_path, run);

  fs::path stem(report_path);
  stem.replace_extension();
  write_trajectory(stem.string() + "_initial.csv", model, sc, q0,
                   cfg.integrator);
  write_trajectory(stem.string() + "_fit.csv", model, sc, rep.q_final,
                   cfg.integrator);

  return rep.converged ? 0 : 2;
}

int cmd_benchmark(const ExperimentConfig& cfg, const std::string& out_dir,
                  int jobs, std::optional<double> scale_override) {
  const OdeModel model = checked_model(cfg, true);
  checked_p0(cfg, model);
  const double scale = scale_override.value_or(cfg.scale);
  if (!(scale > 0.0)) throw FormatError("scale must be positive");
  const int b_eff = std::max(1, static_cast<int>(std::floor(cfg.batches * scale)));
  const int r_eff =
      std::max(1, static_cast<int>(std::floor(cfg.realizations * scale)));

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  const auto batches =
      batch_generate(model, cfg.x0_true, cfg.p_true, cfg.t0, cfg.t_end,
                     cfg.sigma_true, cfg.n_obs, b_eff, r_eff, cfg.seed);

  std::vector<const Dataset*> tasks;
  tasks.reserve(static_cast<std::size_t>(b_eff) * r_eff);
  for (const auto& batch : batches) {
    for (const auto& ds : batch) tasks.push_back(&ds);
  }
  std::vector<RunReport> runs(tasks.size());

  const auto worker = [&](std::atomic<std::size_t>& next) {
    for (std::size_t i = next.fetch_add(1); i < tasks.size();
         i = next.fetch_add(1)) {
      runs[i] = run_one(model, cfg, *tasks[i]);
    }
  };

  std::atomic<std::size_t> next{0};
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (threads == 1) {
    worker(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, std::ref(next));
    for (auto& th : pool) th.join();
  }

  // All files flow through this single thread, in task order, so the output
  // tree is identical whatever the job count was.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& meta = tasks[i]->meta;
    write_dataset((dir / dataset_name(meta.batch, meta.realization)).string(),
                  *tasks[i]);
    write_report((dir / report_name(meta.batch, meta.realization)).string(),
                 runs[i]);
  }

  SummaryMeta meta;
  meta.model = cfg.model;
  meta.m = cfg.m;
  meta.n_obs = cfg.n_obs;
  meta.batches = b_eff;
  meta.realizations = r_eff;
  meta.seed = cfg.seed;
  meta.sigma_true = cfg.sigma_true;
  meta.scale = scale;
  write_summary((dir / "summary.csv").string(), meta, runs);

  if (cfg.emit_truth) {
    const auto truth =
        simulate_truth(model, cfg.x0_true, cfg.p_true, cfg.t0, cfg.t_end);
    write_truth((dir / "truth.csv").string(), truth);
  }

  for (const auto& run : runs) {
    if (run.converged) return 0;
  }
  return 2;
}

}  // namespace msll::cli
