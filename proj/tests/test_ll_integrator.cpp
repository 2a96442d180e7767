#include "msll/ll_integrator.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "msll/data_gen.hpp"
#include "msll/errors.hpp"
#include "msll/model.hpp"
#include "oracles.hpp"
#include "test_models.hpp"

using msll::IntegratorOptions;
using msll::Matrix;
using msll::SegmentSolution;
using msll::Vector;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Matrix random_matrix(msll::Rng& rng, int rows, int cols, double lo = -1.0,
                     double hi = 1.0) {
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) A(i, j) = rng.uniform_in(lo, hi);
  }
  return A;
}

// Uniform-grid options: every step is accepted at the huge tolerance and the
// step memory saturates at h_max, so the node set is h-equispaced and
// independent of the integrand. Used where finite differences or composition
// need identical grids.
IntegratorOptions fixed_grid(double h) {
  IntegratorOptions opts;
  opts.rel_tol = 1e6;
  opts.abs_tol = 1e6;
  opts.h_init = h;
  opts.h_max = h;
  return opts;
}

}  // namespace

TEST_CASE("augmented matrix layout for the scalar linear model") {
  const msll::OdeModel m = test_models::scalar_linear();
  const double lambda = 0.7, x = -1.3;
  const Matrix C =
      msll::build_augmented_matrix(m, 0.0, vec({x}), vec({lambda}));
  REQUIRE(C.rows() == 4);
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = lambda;
  expected(0, 1) = x;
  expected(0, 3) = lambda * x;
  expected(2, 3) = 1.0;
  CHECK((C - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("augmented matrix of an autonomous model has an empty time column") {
  const msll::OdeModel m = msll::rikitake();
  const Matrix C = msll::build_augmented_matrix(m, 1.0, vec({-2, -2, 0}),
                                                vec({0.5, 0.46125}));
  REQUIRE(C.rows() == 7);
  CHECK(C.col(5).head(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(C(5, 6) == 1.0);
}

TEST_CASE("augmented matrix embeds the state Jacobian block") {
  const msll::OdeModel m = msll::henon_heiles();
  const Vector x = vec({0, 0, 0.3, -0.4});
  const Vector p = vec({1, 1, -1});
  const Matrix C = msll::build_augmented_matrix(m, 0.0, x, p);
  REQUIRE(C.rows() == 9);
  CHECK((C.topLeftCorner(4, 4) - m.df_dx(0.0, x, p)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((C.block(0, 4, 4, 3) - m.df_dp(0.0, x, p)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((C.col(8).head(4) - m.f(0.0, x, p)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(C.bottomRows(5).cwiseAbs().sum() == 1.0);
}

TEST_CASE("augmented matrix flags non-finite model output") {
  msll::OdeModel m = test_models::scalar_linear();
  m.f = [](double, const Vector&, const Vector&) {
    return Vector::Constant(1, std::nan("")).eval();
  };
  CHECK_THROWS_AS(msll::build_augmented_matrix(m, 0.5, vec({1}), vec({1})),
                  msll::EvaluationError);
}

TEST_CASE("one step reproduces the linear flow and its sensitivities") {
  msll::Rng rng(301);
  const Matrix A = random_matrix(rng, 3, 3);
  const msll::OdeModel m =
      test_models::affine(A, Matrix::Zero(3, 1), Vector::Zero(3));
  const Vector y0 = vec({0.4, -1.1, 0.7});
  const double h = 0.37;
  const auto step = msll::ll_step(m, 0.0, h, y0, Matrix::Identity(3, 3),
                                  Matrix::Zero(3, 1), vec({0}));
  const Matrix Eh = oracles::taylor_expm(h * A);
  CHECK((step.y - Eh * y0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((step.Ys - Eh).cwiseAbs().maxCoeff() < 1e-12);
  // f does not depend on p here, so the parameter sensitivity stays zero.
  CHECK(step.Yp.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("one step reproduces the scalar affine closed form") {
  const msll::OdeModel m = test_models::scalar_affine();
  const double lambda = -0.8, b = 0.55, x0 = 1.7, h = 0.9;
  const auto step = msll::ll_step(m, 0.0, h, vec({x0}), Matrix::Identity(1, 1),
                                  Matrix::Zero(1, 2), vec({lambda, b}));
  const double expected =
      x0 * std::exp(lambda * h) + (b / lambda) * (std::exp(lambda * h) - 1.0);
  CHECK(step.y(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("steps are exact on affine systems for any step size") {
  msll::Rng rng(302);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix A = random_matrix(rng, 3, 3);
    const Vector b = random_matrix(rng, 3, 1).col(0);
    const msll::OdeModel m = test_models::affine(A, Matrix::Zero(3, 1), b);
    const Vector y0 = random_matrix(rng, 3, 1).col(0);
    const double h = rng.uniform_in(0.05, 2.0);
    const auto step = msll::ll_step(m, 0.0, h, y0, Matrix::Identity(3, 3),
                                    Matrix::Zero(3, 1), vec({0}));
    CHECK((step.y - oracles::affine_flow(A, b, y0, h)).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("segment integration of a rotation returns to the start") {
  Matrix A(2, 2);
  A << 0, 1, -1, 0;
  const msll::OdeModel m =
      test_models::affine(A, Matrix::Zero(2, 1), Vector::Zero(2));
  const Vector y0 = vec({1, 0});
  const SegmentSolution sol = msll::integrate_segment(
      m, y0, vec({0}), 0.0, 2.0 * std::numbers::pi, {});
  CHECK((sol.y.back() - y0).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(sol.grid.nodes.front() == 0.0);
  CHECK(sol.grid.nodes.back() == 2.0 * std::numbers::pi);
}

TEST_CASE("required times appear exactly once among the nodes") {
  const msll::OdeModel m = test_models::scalar_affine();
  const SegmentSolution sol = msll::integrate_segment(
      m, vec({1}), vec({-0.5, 0.2}), 0.0, 1.0, {0.5});
  int hits = 0;
  for (double t : sol.grid.nodes) hits += (t == 0.5);
  CHECK(hits == 1);
  for (size_t i = 1; i < sol.grid.nodes.size(); ++i) {
    CHECK(sol.grid.nodes[i] > sol.grid.nodes[i - 1]);
  }
  CHECK(sol.grid.required_times == std::vector<double>{0.5});
}

TEST_CASE("sensitivities start at identity and zero") {
  const msll::OdeModel m = msll::henon_heiles();
  const SegmentSolution sol = msll::integrate_segment(
      m, vec({0, 0, 0.3, -0.4}), vec({1, 1, -1}), 0.0, 1.0, {0.25});
  CHECK((sol.Ys.front() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.Yp.front().cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.y.size() == sol.grid.nodes.size());
  CHECK(sol.Ys.size() == sol.grid.nodes.size());
  CHECK(sol.Yp.size() == sol.grid.nodes.size());
}

TEST_CASE("unstable parameters blow up mid-interval") {
  const msll::OdeModel m = msll::henon_heiles();
  try {
    msll::integrate_segment(m, vec({0, 0, 0.3, -0.4}), vec({9, 1, 2}), 0.0,
                            10.0, {});
    FAIL("expected BlowUpError");
  } catch (const msll::BlowUpError& e) {
    CHECK(e.time >= 3.5);
    CHECK(e.time <= 6.0);
  }
}

TEST_CASE("step budget is enforced") {
  Matrix A(2, 2);
  A << 0, 1, -1, 0;
  const msll::OdeModel m =
      test_models::affine(A, Matrix::Zero(2, 1), Vector::Zero(2));
  IntegratorOptions opts;
  opts.max_steps = 5;
  opts.h_max = 0.001;
  CHECK_THROWS_AS(
      msll::integrate_segment(m, vec({1, 0}), vec({0}), 0.0, 100.0, {}, opts),
      msll::BudgetError);
}

TEST_CASE("steps never exceed h_max") {
  const msll::OdeModel m = test_models::scalar_affine();
  IntegratorOptions opts;
  opts.h_max = 0.01;
  const SegmentSolution sol =
      msll::integrate_segment(m, vec({1}), vec({0.1, 0}), 0.0, 1.0, {}, opts);
  for (size_t i = 1; i < sol.grid.nodes.size(); ++i) {
    CHECK(sol.grid.nodes[i] - sol.grid.nodes[i - 1] <= 0.01 * (1 + 1e-12));
  }
}

TEST_CASE("variational matrices match finite differences of the flow") {
  msll::Rng rng(303);
  const double t_end = 0.5;
  // The parameter sensitivity converges first order in the step, so the grid
  // must be fine for a 1e-3 comparison against central differences.
  const IntegratorOptions opts = fixed_grid(t_end / 2048.0);
  for (const msll::OdeModel& m :
       {msll::henon_heiles(), msll::fitzhugh_nagumo(), msll::rikitake()}) {
    for (int trial = 0; trial < 5; ++trial) {
      Vector s(m.state_dim), p(m.param_dim);
      for (int i = 0; i < m.state_dim; ++i) s(i) = rng.uniform_in(-0.5, 0.5);
      for (int i = 0; i < m.param_dim; ++i) p(i) = rng.uniform_in(0.3, 0.8);

      const SegmentSolution sol =
          msll::integrate_segment(m, s, p, 0.0, t_end, {}, opts);

      auto endpoint = [&](const Vector& ss, const Vector& pp) {
        return msll::integrate_segment(m, ss, pp, 0.0, t_end, {}, opts)
            .y.back();
      };
      for (int j = 0; j < m.state_dim; ++j) {
        const Vector fd = oracles::central_diff(
            [&](const Vector& ss) { return endpoint(ss, p); }, s, j, 1e-6);
        for (int i = 0; i < m.state_dim; ++i) {
          const double scale = std::max(1.0, std::abs(fd(i)));
          CHECK(std::abs(sol.Ys.back()(i, j) - fd(i)) <= 1e-3 * scale);
        }
      }
      for (int j = 0; j < m.param_dim; ++j) {
        const Vector fd = oracles::central_diff(
            [&](const Vector& pp) { return endpoint(s, pp); }, p, j, 1e-6);
        for (int i = 0; i < m.state_dim; ++i) {
          const double scale = std::max(1.0, std::abs(fd(i)));
          CHECK(std::abs(sol.Yp.back()(i, j) - fd(i)) <= 1e-3 * scale);
        }
      }
    }
  }
}

TEST_CASE("halving the tolerances never worsens the endpoint") {
  const msll::OdeModel m = msll::henon_heiles();
  const Vector s = vec({0, 0, 0.3, -0.4});
  const Vector p = vec({1, 1, -1});
  const double t_end = 3.0;

  IntegratorOptions ref_opts;
  ref_opts.rel_tol = 1e-10;
  ref_opts.abs_tol = 1e-12;
  const Vector ref =
      msll::integrate_segment(m, s, p, 0.0, t_end, {}, ref_opts).y.back();

  double prev_err = std::numeric_limits<double>::infinity();
  IntegratorOptions opts;
  for (int halvings = 0; halvings < 6; ++halvings) {
    const Vector y =
        msll::integrate_segment(m, s, p, 0.0, t_end, {}, opts).y.back();
    const double err = (y - ref).cwiseAbs().maxCoeff();
    CHECK(err <= prev_err);
    prev_err = err;
    opts.rel_tol /= 2.0;
    opts.abs_tol /= 2.0;
  }
}

TEST_CASE("integrating through a waypoint composes exactly") {
  const msll::OdeModel m = msll::rikitake();
  const Vector s = vec({-2, -2, 0});
  const Vector p = vec({0.5, 0.46125});
  const double mid = 1.3, t_end = 2.0;
  const IntegratorOptions opts = fixed_grid(0.05);

  const SegmentSolution a = msll::integrate_segment(m, s, p, 0.0, mid, {}, opts);
  const SegmentSolution b =
      msll::integrate_segment(m, a.y.back(), p, mid, t_end, {}, opts);
  const SegmentSolution whole =
      msll::integrate_segment(m, s, p, 0.0, t_end, {mid}, opts);

  CHECK((whole.y.back() - b.y.back()).cwiseAbs().maxCoeff() < 1e-9);
  const Matrix Ys_chain = b.Ys.back() * a.Ys.back();
  const Matrix Yp_chain = b.Ys.back() * a.Yp.back() + b.Yp.back();
  CHECK((whole.Ys.back() - Ys_chain).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((whole.Yp.back() - Yp_chain).cwiseAbs().maxCoeff() < 1e-9);
}
