#include "msll/data_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "msll/errors.hpp"
#include "msll/serialize.hpp"

namespace msll {

namespace {

constexpr double kTwoPow53 = 9007199254740992.0;  // 2^53

std::uint64_t splitmix_final(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) / kTwoPow53;
}

double Rng::uniform_in(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) / kTwoPow53;
  const double u2 = static_cast<double>(gen_() >> 11) / kTwoPow53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t batch,
                          std::uint64_t realization) {
  std::uint64_t h = splitmix_final(master + 0x9E3779B97F4A7C15ull);
  h = splitmix_final(h ^ (batch + 0x9E3779B97F4A7C15ull));
  h = splitmix_final(h ^ (realization + 0x9E3779B97F4A7C15ull));
  return h;
}

ReferenceTrajectory::ReferenceTrajectory(const OdeModel& model, Vector x0,
                                         Vector p, double t0, double t_end,
                                         double h)
    : model_(model), p_(std::move(p)), t0_(t0), t_end_(t_end), h_(h) {
  if (!(t0 < t_end)) {
    throw Error("simulate_truth: need t0 < t_end");
  }
  if (!(h > 0.0)) {
    throw Error("simulate_truth: step must be positive");
  }
  const int d = model_.state_dim;
  const Matrix I = Matrix::Identity(d, d);
  const Matrix Z = Matrix::Zero(d, model_.param_dim);

  const auto steps = static_cast<long>(std::floor((t_end_ - t0_) / h_));
  nodes_.reserve(static_cast<size_t>(steps) + 1);
  nodes_.push_back(std::move(x0));
  try {
    for (long k = 0; k < steps; ++k) {
      const double t = t0_ + static_cast<double>(k) * h_;
      nodes_.push_back(ll_step(model_, t, h_, nodes_.back(), I, Z, p_).y);
    }
  } catch (const Error& e) {
    throw BlowUpError(std::string("simulate_truth: reference trajectory "
                                  "failed: ") +
                          e.what(),
                      t0_ + static_cast<double>(nodes_.size() - 1) * h_);
  }
}

Vector ReferenceTrajectory::state_at(double t) const {
  if (t < t0_ || t > t_end_) {
    throw Error("state_at: time " + format_double(t) + " outside [" +
                format_double(t0_) + ", " + format_double(t_end_) + "]");
  }
  auto k = static_cast<long>(std::floor((t - t0_) / h_));
  const auto last = static_cast<long>(nodes_.size()) - 1;
  if (k > last) k = last;
  const double tk = t0_ + static_cast<double>(k) * h_;
  const double dt = t - tk;
  if (dt <= 0.0) return nodes_[static_cast<size_t>(k)];
  const int d = model_.state_dim;
  return ll_step(model_, tk, dt, nodes_[static_cast<size_t>(k)],
                 Matrix::Identity(d, d), Matrix::Zero(d, model_.param_dim), p_)
      .y;
}

Vector ReferenceTrajectory::observe_at(double t) const {
  return model_.g(t, state_at(t), p_);
}

ReferenceTrajectory simulate_truth(const OdeModel& model, const Vector& x0,
                                   const Vector& p, double t0, double t_end,
                                   double h) {
  return ReferenceTrajectory(model, x0, p, t0, t_end, h);
}

std::vector<double> sample_times(double t0, double t_end, int n, Rng& rng) {
  std::vector<double> times(static_cast<size_t>(n));
  while (true) {
    for (auto& t : times) t = rng.uniform_in(t0, t_end);
    std::sort(times.begin(), times.end());
    bool distinct = true;
    for (size_t i = 1; i < times.size(); ++i) {
      if (times[i] == times[i - 1]) {
        distinct = false;
        break;
      }
    }
    if (distinct) return times;
  }
}

Dataset sample_observations_at(const ReferenceTrajectory& truth,
                               const OdeModel& model, double sigma,
                               const std::vector<double>& times,
                               std::uint64_t noise_seed) {
  Rng noise(noise_seed);
  Dataset ds;
  ds.times = times;
  ds.observations.reserve(times.size());
  for (double t : times) {
    Vector z = truth.observe_at(t);
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) += sigma * noise.normal();
    ds.observations.push_back(std::move(z));
  }
  ds.meta.model = model.name;
  ds.meta.p_true = truth.params();
  ds.meta.x0_true = truth.node_states().front();
  ds.meta.sigma_true = sigma;
  ds.meta.t0 = truth.t0();
  ds.meta.t_end = truth.t_end();
  return ds;
}

Dataset sample_observations(const ReferenceTrajectory& truth,
                            const OdeModel& model, double sigma, int n,
                            std::uint64_t seed) {
  Rng time_rng(derive_seed(seed, 1, 0));
  const auto times = sample_times(truth.t0(), truth.t_end(), n, time_rng);
  Dataset ds =
      sample_observations_at(truth, model, sigma, times, derive_seed(seed, 1, 1));
  ds.meta.seed = seed;
  ds.meta.batch = 1;
  ds.meta.realization = 1;
  return ds;
}

std::vector<std::vector<Dataset>> batch_generate(
    const OdeModel& model, const Vector& x0, const Vector& p, double t0,
    double t_end, double sigma, int n, int batches, int realizations,
    std::uint64_t master_seed) {
  const ReferenceTrajectory truth(model, x0, p, t0, t_end);
  std::vector<std::vector<Dataset>> out(static_cast<size_t>(batches));
  for (int b = 1; b <= batches; ++b) {
    Rng time_rng(derive_seed(master_seed, static_cast<std::uint64_t>(b), 0));
    const auto times = sample_times(t0, t_end, n, time_rng);
    auto& batch = out[static_cast<size_t>(b - 1)];
    batch.reserve(static_cast<size_t>(realizations));
    for (int r = 1; r <= realizations; ++r) {
      Dataset ds = sample_observations_at(
          truth, model, sigma, times,
          derive_seed(master_seed, static_cast<std::uint64_t>(b),
                      static_cast<std::uint64_t>(r)));
      ds.meta.seed = master_seed;
      ds.meta.batch = b;
      ds.meta.realization = r;
      batch.push_back(std::move(ds));
    }
  }
  return out;
}

void write_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const auto n = static_cast<int>(ds.times.size());
  const int v = n > 0 ? static_cast<int>(ds.observations.front().size()) : 0;
  out << "# msll-dataset v1\n";
  out << "# model=" << ds.meta.model << " sigma=" << format_double(ds.meta.sigma_true)
      << " seed=" << ds.meta.seed << " t0=" << format_double(ds.meta.t0)
      << " T=" << format_double(ds.meta.t_end) << " N=" << n << " v=" << v
      << " p_true=" << format_vector(ds.meta.p_true)
      << " x0_true=" << format_vector(ds.meta.x0_true)
      << " batch=" << ds.meta.batch << " realization=" << ds.meta.realization
      << "\n";
  for (int i = 0; i < n; ++i) {
    out << format_double(ds.times[static_cast<size_t>(i)]);
    const Vector& z = ds.observations[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      out << ',' << format_double(z(j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "# msll-dataset v1") {
    throw FormatError(path + ":1: expected '# msll-dataset v1' header");
  }
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw FormatError(path + ":2: expected '# key=value ...' metadata line");
  }

  Dataset ds;
  int n = -1, v = -1;
  std::stringstream meta(line.substr(2));
  std::string token;
  while (meta >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path + ":2: malformed metadata token '" + token + "'");
    }
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    const std::string ctx = path + ":2: " + key;
    if (key == "model") ds.meta.model = val;
    else if (key == "sigma") ds.meta.sigma_true = parse_double(val, ctx);
    else if (key == "seed") ds.meta.seed = std::strtoull(val.c_str(), nullptr, 10);
    else if (key == "t0") ds.meta.t0 = parse_double(val, ctx);
    else if (key == "T") ds.meta.t_end = parse_double(val, ctx);
    else if (key == "N") n = static_cast<int>(parse_double(val, ctx));
    else if (key == "v") v = static_cast<int>(parse_double(val, ctx));
    else if (key == "p_true") ds.meta.p_true = parse_vector(val, ctx);
    else if (key == "x0_true") ds.meta.x0_true = parse_vector(val, ctx);
    else if (key == "batch") ds.meta.batch = static_cast<int>(parse_double(val, ctx));
    else if (key == "realization") ds.meta.realization = static_cast<int>(parse_double(val, ctx));
  }
  if (ds.meta.model.empty() || n < 0 || v < 0) {
    throw FormatError(path + ":2: metadata must include model, N and v");
  }

  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string ctx = path + ":" + std::to_string(lineno);
    const Vector row = parse_vector(line, ctx);
    if (row.size() != v + 1) {
      throw FormatError(ctx + ": expected " + std::to_string(v + 1) +
                        " comma-separated values, got " +
                        std::to_string(row.size()));
    }
    ds.times.push_back(row(0));
    ds.observations.push_back(row.tail(v));
  }
  if (static_cast<int>(ds.times.size()) != n) {
    throw FormatError(path + ": header says N=" + std::to_string(n) +
                      " but found " + std::to_string(ds.times.size()) +
                      " data rows");
  }
  for (size_t i = 1; i < ds.times.size(); ++i) {
    if (!(ds.times[i] > ds.times[i - 1])) {
      throw FormatError(path + ": observation times not strictly increasing");
    }
  }
  return ds;
}

}  // namespace msll
