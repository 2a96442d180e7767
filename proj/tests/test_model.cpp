#include "msll/model.hpp"

#include <cmath>

#include "doctest.h"
#include "msll/data_gen.hpp"
#include "msll/errors.hpp"
#include "oracles.hpp"

using msll::Matrix;
using msll::OdeModel;
using msll::Vector;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Per-model sampling boxes that keep trajectories and derivatives tame.
struct SampleBox {
  double x_lo, x_hi;
  Vector p_lo, p_hi;
};

SampleBox box_for(const OdeModel& m) {
  if (m.name == "henon_heiles") return {-0.5, 0.5, vec({0.5, 0.5, -1.5}), vec({1.5, 1.5, -0.5})};
  if (m.name == "fitzhugh_nagumo") return {-2.0, 2.0, vec({0.0, 0.0, 2.0}), vec({0.5, 0.5, 4.0})};
  return {-2.0, 2.0, vec({0.3, 0.3}), vec({0.7, 0.7})};
}

void check_jacobians_once(const OdeModel& m, msll::Rng& rng) {
  const SampleBox box = box_for(m);
  const double t = rng.uniform_in(0.0, 10.0);
  Vector x(m.state_dim), p(m.param_dim);
  for (int i = 0; i < m.state_dim; ++i) x(i) = rng.uniform_in(box.x_lo, box.x_hi);
  for (int i = 0; i < m.param_dim; ++i) p(i) = rng.uniform_in(box.p_lo(i), box.p_hi(i));

  auto close = [](const Matrix& analytic, const Matrix& fd) {
    for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
      for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
        const double scale = std::max({1.0, std::abs(analytic(i, j)), std::abs(fd(i, j))});
        REQUIRE(std::abs(analytic(i, j) - fd(i, j)) <= 1e-5 * scale);
      }
    }
  };

  {
    Matrix fd(m.state_dim, m.state_dim);
    for (int j = 0; j < m.state_dim; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
      fd.col(j) = oracles::central_diff(
          [&](const Vector& xx) { return m.f(t, xx, p); }, x, j, h);
    }
    close(m.df_dx(t, x, p), fd);
  }
  {
    Matrix fd(m.state_dim, m.param_dim);
    for (int j = 0; j < m.param_dim; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(p(j)));
      fd.col(j) = oracles::central_diff(
          [&](const Vector& pp) { return m.f(t, x, pp); }, p, j, h);
    }
    close(m.df_dp(t, x, p), fd);
  }
  {
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    const Vector fd = (m.f(t + h, x, p) - m.f(t - h, x, p)) / (2.0 * h);
    close(m.df_dt(t, x, p), fd);
  }
  {
    Matrix fd(m.obs_dim, m.state_dim);
    for (int j = 0; j < m.state_dim; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
      fd.col(j) = oracles::central_diff(
          [&](const Vector& xx) { return m.g(t, xx, p); }, x, j, h);
    }
    close(m.dg_dx(t, x, p), fd);
  }
  {
    Matrix fd(m.obs_dim, m.param_dim);
    for (int j = 0; j < m.param_dim; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(p(j)));
      fd.col(j) = oracles::central_diff(
          [&](const Vector& pp) { return m.g(t, x, pp); }, p, j, h);
    }
    close(m.dg_dp(t, x, p), fd);
  }
}

}  // namespace

TEST_CASE("two-oscillator field vanishes where the cross terms do") {
  const OdeModel m = msll::henon_heiles();
  const Vector dx = m.f(0.0, vec({0, 0, 0.3, -0.4}), vec({1, 1, -1}));
  CHECK(dx(0) == 0.3);
  CHECK(dx(1) == -0.4);
  CHECK(dx(2) == 0.0);
  CHECK(dx(3) == 0.0);
}

TEST_CASE("two-oscillator field hand evaluation") {
  const OdeModel m = msll::henon_heiles();
  const Vector dx = m.f(0.0, vec({0.1, 0.2, 0, 0}), vec({1, 1, -1}));
  CHECK(dx(0) == 0.0);
  CHECK(dx(1) == 0.0);
  CHECK(dx(2) == doctest::Approx(-0.14).epsilon(1e-14));
  CHECK(dx(3) == doctest::Approx(-0.17).epsilon(1e-14));
}

TEST_CASE("two-oscillator parameter Jacobian is linear in the parameters") {
  const OdeModel m = msll::henon_heiles();
  const Vector x = vec({0.3, -0.7, 0.1, 0.2});
  const Matrix J = m.df_dp(1.0, x, vec({2, 3, 4}));
  CHECK(J.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(J.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(J(2, 0) == -x(0));
  CHECK(J(3, 1) == -x(1));
  CHECK(J(3, 2) == -x(1) * x(1));
  CHECK(J(2, 1) == 0.0);
  CHECK(J(2, 2) == 0.0);
  CHECK(J(3, 0) == 0.0);
}

TEST_CASE("spike model field hand evaluation") {
  const OdeModel m = msll::fitzhugh_nagumo();
  const Vector dx = m.f(0.0, vec({-1, 1}), vec({0.2, 0.2, 3}));
  CHECK(dx(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dx(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("spike model observes the first component only") {
  const OdeModel m = msll::fitzhugh_nagumo();
  CHECK(m.obs_dim == 1);
  const Vector z = m.g(0.0, vec({-0.3, 0.8}), vec({0.2, 0.2, 3}));
  CHECK(z.size() == 1);
  CHECK(z(0) == -0.3);
  const Matrix G = m.dg_dx(0.0, vec({-0.3, 0.8}), vec({0.2, 0.2, 3}));
  CHECK(G(0, 0) == 1.0);
  CHECK(G(0, 1) == 0.0);
}

TEST_CASE("spike model recovery-rate sensitivity") {
  const OdeModel m = msll::fitzhugh_nagumo();
  const double V = -0.4, R = 0.9, a = 0.2, b = 0.3, c = 3.0;
  const Matrix J = m.df_dp(0.0, vec({V, R}), vec({a, b, c}));
  CHECK(J(1, 2) == doctest::Approx((V - a + b * R) / (c * c)).epsilon(1e-14));
}

TEST_CASE("dynamo field hand evaluation") {
  const OdeModel m = msll::rikitake();
  const Vector dx = m.f(0.0, vec({-2, -2, 0}), vec({0.5, 0.46125}));
  CHECK(dx(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dx(1) == doctest::Approx(1.9225).epsilon(1e-14));
  CHECK(dx(2) == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("dynamo parameter Jacobian columns") {
  const OdeModel m = msll::rikitake();
  const Vector x = vec({0.7, -1.2, 0.4});
  const Matrix J = m.df_dp(2.0, x, vec({0.5, 0.46125}));
  CHECK(J(0, 0) == -x(0));
  CHECK(J(1, 0) == -x(1));
  CHECK(J(2, 0) == 0.0);
  CHECK(J(0, 1) == 0.0);
  CHECK(J(1, 1) == -x(0));
  CHECK(J(2, 1) == 0.0);
}

TEST_CASE("all built-in models are autonomous") {
  msll::Rng rng(201);
  for (const OdeModel& m :
       {msll::henon_heiles(), msll::fitzhugh_nagumo(), msll::rikitake()}) {
    for (int trial = 0; trial < 5; ++trial) {
      Vector x(m.state_dim), p(m.param_dim);
      for (int i = 0; i < m.state_dim; ++i) x(i) = rng.uniform_in(-1, 1);
      for (int i = 0; i < m.param_dim; ++i) p(i) = rng.uniform_in(0.2, 2);
      CHECK(m.df_dt(rng.uniform_in(0, 10), x, p).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("analytic Jacobians agree with central finite differences") {
  msll::Rng rng(202);
  for (const OdeModel& m :
       {msll::henon_heiles(), msll::fitzhugh_nagumo(), msll::rikitake()}) {
    for (int trial = 0; trial < 100; ++trial) check_jacobians_once(m, rng);
  }
}

TEST_CASE("model lookup by name") {
  CHECK(msll::model_by_name("henon_heiles").state_dim == 4);
  CHECK(msll::model_by_name("fitzhugh_nagumo").obs_dim == 1);
  CHECK(msll::model_by_name("rikitake").param_dim == 2);
  CHECK_THROWS_AS(msll::model_by_name("lorenz"), msll::FormatError);
}
