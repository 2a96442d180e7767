#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "msll/ll_integrator.hpp"
#include "msll/linalg.hpp"
#include "msll/model.hpp"

namespace msll {

// Deterministic random source: mt19937_64 (bit-exact by the C++ standard)
// with explicit output transforms, so streams are reproducible from the seed
// alone. Uniforms take the top 53 bits; normals use the Box-Muller transform
// on the pair (u1 in (0,1], u2 in [0,1)), returning sqrt(-2 ln u1) cos(2 pi u2)
// first and caching the sine mate for the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();                         // [0, 1)
  double uniform_in(double a, double b);    // a + (b-a)*uniform()
  double normal();                          // standard normal

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable seed for (master, batch, realization) via chained splitmix64
// finalizers. Realization 0 is reserved for the batch's observation-time draw;
// noise streams use realization >= 1.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t batch,
                          std::uint64_t realization);

struct DatasetMeta {
  std::string model;
  Vector p_true;
  Vector x0_true;
  double sigma_true = 0.0;
  std::uint64_t seed = 0;
  double t0 = 0.0;
  double t_end = 0.0;
  int batch = 0;        // 1-based within a protocol, 0 outside one
  int realization = 0;
};

struct Dataset {
  std::vector<double> times;         // strictly increasing, inside [t0, t_end]
  std::vector<Vector> observations;  // one length-v vector per time
  DatasetMeta meta;
};

// Ground-truth trajectory on a fixed dyadic step (default 2^-12), queryable at
// arbitrary times. Node states are cached over the whole interval up front;
// a query lands on the preceding cached node plus one truncated step, so
// results do not depend on query order. Construction throws BlowUpError if the
// system explodes on the interval.
class ReferenceTrajectory {
 public:
  ReferenceTrajectory(const OdeModel& model, Vector x0, Vector p, double t0,
                      double t_end, double h = 0.000244140625);

  Vector state_at(double t) const;
  Vector observe_at(double t) const;  // g applied to state_at

  double t0() const { return t0_; }
  double t_end() const { return t_end_; }
  double step() const { return h_; }
  const Vector& params() const { return p_; }
  const std::vector<Vector>& node_states() const { return nodes_; }

 private:
  OdeModel model_;
  Vector p_;
  double t0_, t_end_, h_;
  std::vector<Vector> nodes_;
};

ReferenceTrajectory simulate_truth(const OdeModel& model, const Vector& x0,
                                   const Vector& p, double t0, double t_end,
                                   double h = 0.000244140625);

// N observation times drawn uniformly on the interval and sorted; the whole
// set is redrawn in the (measure-zero) event of a duplicate.
std::vector<double> sample_times(double t0, double t_end, int n, Rng& rng);

// One synthetic dataset: times from stream derive_seed(seed, 1, 0), noise from
// derive_seed(seed, 1, 1), z_i = g(t_i, x(t_i), p) + sigma*eps with eps drawn
// per observation component in row-major order. Equals the single dataset of
// batch_generate(B=1, R=1) at the same master seed.
Dataset sample_observations(const ReferenceTrajectory& truth,
                            const OdeModel& model, double sigma, int n,
                            std::uint64_t seed);

// Same, with the observation times fixed by the caller (shared batch grid).
Dataset sample_observations_at(const ReferenceTrajectory& truth,
                               const OdeModel& model, double sigma,
                               const std::vector<double>& times,
                               std::uint64_t noise_seed);

// B batches sharing one time grid each, R noise realizations per batch.
// Every dataset's meta records (batch, realization) 1-based and the master
// seed. Pure function of its arguments.
std::vector<std::vector<Dataset>> batch_generate(const OdeModel& model,
                                                 const Vector& x0,
                                                 const Vector& p, double t0,
                                                 double t_end, double sigma,
                                                 int n, int batches,
                                                 int realizations,
                                                 std::uint64_t master_seed);

// Text format, bit-exact round trip:
//   # msll-dataset v1
//   # key=value pairs: model sigma seed t0 T N v p_true x0_true batch realization
//   t,z_1,...,z_v rows at 17 significant digits
void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

}  // namespace msll
