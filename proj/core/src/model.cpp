#include "msll/model.hpp"

#include "msll/errors.hpp"

namespace msll {

namespace {

Matrix projection_rows(int v, int d) {
  return Matrix::Identity(v, d);
}

}  // namespace

OdeModel henon_heiles() {
  OdeModel m;
  m.name = "henon_heiles";
  m.state_dim = 4;
  m.param_dim = 3;
  m.obs_dim = 4;

  m.f = [](double, const Vector& x, const Vector& p) {
    Vector dx(4);
    dx(0) = x(2);
    dx(1) = x(3);
    dx(2) = -p(0) * x(0) - 2.0 * x(0) * x(1);
    dx(3) = -p(1) * x(1) - x(0) * x(0) - p(2) * x(1) * x(1);
    return dx;
  };
  m.df_dx = [](double, const Vector& x, const Vector& p) {
    Matrix J = Matrix::Zero(4, 4);
    J(0, 2) = 1.0;
    J(1, 3) = 1.0;
    J(2, 0) = -p(0) - 2.0 * x(1);
    J(2, 1) = -2.0 * x(0);
    J(3, 0) = -2.0 * x(0);
    J(3, 1) = -p(1) - 2.0 * p(2) * x(1);
    return J;
  };
  m.df_dp = [](double, const Vector& x, const Vector&) {
    Matrix J = Matrix::Zero(4, 3);
    J(2, 0) = -x(0);
    J(3, 1) = -x(1);
    J(3, 2) = -x(1) * x(1);
    return J;
  };
  m.df_dt = [](double, const Vector&, const Vector&) { return Vector::Zero(4); };
  m.g = [](double, const Vector& x, const Vector&) { return x; };
  m.dg_dx = [](double, const Vector&, const Vector&) { return projection_rows(4, 4); };
  m.dg_dp = [](double, const Vector&, const Vector&) { return Matrix::Zero(4, 3); };
  return m;
}

OdeModel fitzhugh_nagumo() {
  OdeModel m;
  m.name = "fitzhugh_nagumo";
  m.state_dim = 2;
  m.param_dim = 3;
  m.obs_dim = 1;

  m.f = [](double, const Vector& x, const Vector& p) {
    const double V = x(0), R = x(1);
    const double a = p(0), b = p(1), c = p(2);
    Vector dx(2);
    dx(0) = c * (V - V * V * V / 3.0 + R);
    dx(1) = -(V - a + b * R) / c;
    return dx;
  };
  m.df_dx = [](double, const Vector& x, const Vector& p) {
    const double V = x(0);
    const double b = p(1), c = p(2);
    Matrix J(2, 2);
    J(0, 0) = c * (1.0 - V * V);
    J(0, 1) = c;
    J(1, 0) = -1.0 / c;
    J(1, 1) = -b / c;
    return J;
  };
  m.df_dp = [](double, const Vector& x, const Vector& p) {
    const double V = x(0), R = x(1);
    const double a = p(0), b = p(1), c = p(2);
    Matrix J = Matrix::Zero(2, 3);
    J(0, 2) = V - V * V * V / 3.0 + R;
    J(1, 0) = 1.0 / c;
    J(1, 1) = -R / c;
    J(1, 2) = (V - a + b * R) / (c * c);
    return J;
  };
  m.df_dt = [](double, const Vector&, const Vector&) { return Vector::Zero(2); };
  m.g = [](double, const Vector& x, const Vector&) {
    Vector z(1);
    z(0) = x(0);
    return z;
  };
  m.dg_dx = [](double, const Vector&, const Vector&) { return projection_rows(1, 2); };
  m.dg_dp = [](double, const Vector&, const Vector&) { return Matrix::Zero(1, 3); };
  return m;
}

OdeModel rikitake() {
  OdeModel m;
  m.name = "rikitake";
  m.state_dim = 3;
  m.param_dim = 2;
  m.obs_dim = 3;

  m.f = [](double, const Vector& x, const Vector& p) {
    const double mu = p(0), alpha = p(1);
    Vector dx(3);
    dx(0) = -mu * x(0) + x(1) * x(2);
    dx(1) = -alpha * x(0) - mu * x(1) + x(0) * x(2);
    dx(2) = 1.0 - x(0) * x(1);
    return dx;
  };
  m.df_dx = [](double, const Vector& x, const Vector& p) {
    const double mu = p(0), alpha = p(1);
    Matrix J(3, 3);
    J(0, 0) = -mu;
    J(0, 1) = x(2);
    J(0, 2) = x(1);
    J(1, 0) = -alpha + x(2);
    J(1, 1) = -mu;
    J(1, 2) = x(0);
    J(2, 0) = -x(1);
    J(2, 1) = -x(0);
    J(2, 2) = 0.0;
    return J;
  };
  m.df_dp = [](double, const Vector& x, const Vector&) {
    Matrix J = Matrix::Zero(3, 2);
    J(0, 0) = -x(0);
    J(1, 0) = -x(1);
    J(1, 1) = -x(0);
    return J;
  };
  m.df_dt = [](double, const Vector&, const Vector&) { return Vector::Zero(3); };
  m.g = [](double, const Vector& x, const Vector&) { return x; };
  m.dg_dx = [](double, const Vector&, const Vector&) { return projection_rows(3, 3); };
  m.dg_dp = [](double, const Vector&, const Vector&) { return Matrix::Zero(3, 2); };
  return m;
}

OdeModel model_by_name(const std::string& name) {
  if (name == "henon_heiles") return henon_heiles();
  if (name == "fitzhugh_nagumo") return fitzhugh_nagumo();
  if (name == "rikitake") return rikitake();
  throw FormatError("unknown model '" + name +
                    "' (expected henon_heiles, fitzhugh_nagumo or rikitake)");
}

}  // namespace msll
