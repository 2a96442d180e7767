#pragma once

#include <functional>
#include <string>

#include "msll/linalg.hpp"

namespace msll {

// A smooth ODE model dx/dt = f(t, x, p) observed through z = g(t, x, p) + noise.
// All derivative maps are analytic; the local linearization step is exact in
// them, so numeric differentiation here would degrade the integrator.
struct OdeModel {
  std::string name;
  int state_dim = 0;  // d
  int param_dim = 0;  // p
  int obs_dim = 0;    // v

  using VectorFn = std::function<Vector(double, const Vector&, const Vector&)>;
  using MatrixFn = std::function<Matrix(double, const Vector&, const Vector&)>;

  VectorFn f;      // d
  MatrixFn df_dx;  // d x d
  MatrixFn df_dp;  // d x p
  VectorFn df_dt;  // d
  VectorFn g;      // v
  MatrixFn dg_dx;  // v x d
  MatrixFn dg_dp;  // v x p
};

// Two coupled oscillators with cubic coupling; chaotic for the reference
// parameters. x = (x1, x2, x3, x4), p = (a, b, c), all components observed.
OdeModel henon_heiles();

// Spike-generation dynamics, x = (V, R), p = (a, b, c), only V observed.
OdeModel fitzhugh_nagumo();

// Two-disc dynamo, x = (x1, x2, x3), p = (mu, alpha), all components observed.
OdeModel rikitake();

// Lookup by the names accepted in config files: "henon_heiles",
// "fitzhugh_nagumo", "rikitake". Throws FormatError for anything else.
OdeModel model_by_name(const std::string& name);

}  // namespace msll
