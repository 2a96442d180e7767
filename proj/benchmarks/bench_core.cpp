// Microbenchmarks for the hot paths: the matrix exponential that dominates
// every integration step, one local linearization step, a full segment
// integration, and the condense-and-solve pass of a protocol-sized increment.

#include <benchmark/benchmark.h>

#include <random>

#include "msll/linalg.hpp"
#include "msll/ll_integrator.hpp"
#include "msll/model.hpp"
#include "msll/shooting.hpp"

namespace {

using msll::LinearizedSystem;
using msll::Matrix;
using msll::Vector;

Matrix random_matrix(std::mt19937_64& gen, int rows, int cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) A(i, j) = u(gen);
  }
  return A;
}

Vector random_vector(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(gen);
  return v;
}

// The augmented matrix of a d-state, p-parameter model is (d+p+2) square;
// size 9 is the oscillator model, 7 the dynamo, 7 the spike model.
void BM_Expm(benchmark::State& state) {
  std::mt19937_64 gen(7);
  const int n = static_cast<int>(state.range(0));
  const Matrix A = 0.1 * random_matrix(gen, n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(msll::expm(A));
  }
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(7)->Arg(9)->Arg(16);

void BM_LlStep(benchmark::State& state) {
  const auto model = msll::henon_heiles();
  Vector y(4);
  y << 0.0, 0.0, 0.3, -0.4;
  Vector p(3);
  p << 1.0, 1.0, -1.0;
  const Matrix Ys = Matrix::Identity(4, 4);
  const Matrix Yp = Matrix::Zero(4, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(msll::ll_step(model, 0.0, 0.01, y, Ys, Yp, p));
  }
}
BENCHMARK(BM_LlStep);

// One shooting segment of the oscillator protocol: window length 0.2 at the
// true parameters, default adaptive tolerances.
void BM_IntegrateSegment(benchmark::State& state) {
  const auto model = msll::henon_heiles();
  Vector s(4);
  s << 0.0, 0.0, 0.3, -0.4;
  Vector p(3);
  p << 1.0, 1.0, -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        msll::integrate_segment(model, s, p, 0.0, 0.2, {}, {}));
  }
}
BENCHMARK(BM_IntegrateSegment);

// Condense, solve and expand at the oscillator protocol size: 4 states,
// 3 parameters, 400 residual rows, segment count swept.
void BM_GaussNewtonIncrement(benchmark::State& state) {
  std::mt19937_64 gen(11);
  const int d = 4;
  const int np = 3;
  const int m = static_cast<int>(state.range(0));
  LinearizedSystem sys;
  sys.state_dim = d;
  sys.param_dim = np;
  sys.obs_dim = d;
  sys.F1 = random_vector(gen, 400);
  sys.dF1_dp = random_matrix(gen, 400, np);
  for (int k = 0; k <= m; ++k) sys.dF1_ds.push_back(random_matrix(gen, 400, d));
  for (int k = 0; k < m; ++k) {
    sys.c.push_back(random_vector(gen, d));
    sys.dc_ds.push_back(random_matrix(gen, d, d) + 1.5 * Matrix::Identity(d, d));
    sys.dc_dp.push_back(random_matrix(gen, d, np));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(msll::gauss_newton_increment(sys, false));
  }
}
BENCHMARK(BM_GaussNewtonIncrement)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
