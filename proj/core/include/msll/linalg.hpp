#pragma once

#include <Eigen/Dense>

namespace msll {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Matrix exponential by scaling-and-squaring with diagonal Pade approximants.
// Deterministic for identical input bits. Throws DimensionError if A is not
// square. Overflow is not an error: non-finite entries propagate to the result
// and are caught by callers that care (the integrator treats them as blow-up).
Matrix expm(const Matrix& A);

// Minimizer of |X b - y|_2 through a column-pivoted QR factorization.
// Throws RankDeficiencyError when X does not have full column rank.
Vector lstsq(const Matrix& X, const Vector& y);

// Minimizer of |X b - y|_2 subject to A b = c, via the bordered KKT system
//   [X'X  A'] [b ]   [X'y]
//   [A    0 ] [mu] = [c  ].
// A with zero rows degrades to lstsq. Throws SingularConstraintError when the
// KKT matrix is singular (degenerate constraints or infeasible problem).
Vector constrained_lstsq(const Matrix& X, const Vector& y, const Matrix& A,
                         const Vector& c);

}  // namespace msll
