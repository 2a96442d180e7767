#include "msll_cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "msll/errors.hpp"
#include "msll/serialize.hpp"

namespace msll::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(const std::string& s, const std::string& ctx) {
  const double x = parse_double(s, ctx);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) {
    throw FormatError(ctx + ": expected an integer, got '" + s + "'");
  }
  return i;
}

bool parse_flag(const std::string& s, const std::string& ctx) {
  if (s == "0" || s == "false") return false;
  if (s == "1" || s == "true") return true;
  throw FormatError(ctx + ": expected 0/1 or true/false, got '" + s + "'");
}

std::uint64_t parse_seed(const std::string& s, const std::string& ctx) {
  const char* p = s.c_str();
  char* end = nullptr;
  const std::uint64_t x = std::strtoull(p, &end, 10);
  if (end == p || *end != '\0') {
    throw FormatError(ctx + ": cannot parse seed '" + s + "'");
  }
  return x;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& name) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = name + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(where + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw FormatError(where + ": empty key or value");
    }
    const std::string ctx = where + ": " + key;

    if (key == "model") cfg.model = val;
    else if (key == "t0") cfg.t0 = parse_double(val, ctx);
    else if (key == "T") cfg.t_end = parse_double(val, ctx);
    else if (key == "x0_true") cfg.x0_true = parse_vector(val, ctx);
    else if (key == "p_true") cfg.p_true = parse_vector(val, ctx);
    else if (key == "sigma_true") cfg.sigma_true = parse_double(val, ctx);
    else if (key == "N") cfg.n_obs = parse_int(val, ctx);
    else if (key == "m") cfg.m = parse_int(val, ctx);
    else if (key == "p0") cfg.p0 = parse_vector(val, ctx);
    else if (key == "sigma0") cfg.sigma0 = parse_double(val, ctx);
    else if (key == "fixed_x0") cfg.fixed_x0 = parse_flag(val, ctx);
    else if (key == "batches") cfg.batches = parse_int(val, ctx);
    else if (key == "realizations") cfg.realizations = parse_int(val, ctx);
    else if (key == "seed") cfg.seed = parse_seed(val, ctx);
    else if (key == "scale") cfg.scale = parse_double(val, ctx);
    else if (key == "emit_truth") cfg.emit_truth = parse_flag(val, ctx);
    else if (key == "eps_stop") cfg.optimizer.eps_stop = parse_double(val, ctx);
    else if (key == "eta") cfg.optimizer.eta = parse_double(val, ctx);
    else if (key == "alpha_min") cfg.optimizer.alpha_min = parse_double(val, ctx);
    else if (key == "max_iter") cfg.optimizer.max_iter = parse_int(val, ctx);
    else if (key == "rel_tol") cfg.integrator.rel_tol = parse_double(val, ctx);
    else if (key == "abs_tol") cfg.integrator.abs_tol = parse_double(val, ctx);
    else if (key == "max_steps") cfg.integrator.max_steps = parse_int(val, ctx);
    else throw FormatError(where + ": unknown key '" + key + "'");
  }

  if (cfg.model.empty()) {
    throw FormatError(name + ": config must set 'model'");
  }
  if (!(cfg.t0 < cfg.t_end)) {
    throw FormatError(name + ": config needs t0 < T");
  }
  if (cfg.m < 0) throw FormatError(name + ": m must be >= 0");
  if (cfg.n_obs < 0) throw FormatError(name + ": N must be >= 1");
  if (cfg.batches < 1 || cfg.realizations < 1) {
    throw FormatError(name + ": batches and realizations must be >= 1");
  }
  if (!(cfg.scale > 0.0)) {
    throw FormatError(name + ": scale must be positive");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace msll::cli
