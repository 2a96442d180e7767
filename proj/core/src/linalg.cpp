#include "msll/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msll/errors.hpp"

namespace msll {

namespace {

// Pade order thresholds on the 1-norm, from Higham, "The scaling and squaring
// method for the matrix exponential revisited" (SIAM J. Matrix Anal. 2005).
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068;
constexpr double kTheta13 = 5.371920351148152;

Matrix pade_solve(const Matrix& U, const Matrix& V) {
  return Eigen::PartialPivLU<Matrix>(V - U).solve(V + U);
}

}  // namespace

Matrix expm(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw DimensionError("expm: matrix must be square, got " +
                         std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()));
  }
  const Eigen::Index n = A.rows();
  if (n == 0) return Matrix(0, 0);

  const Matrix I = Matrix::Identity(n, n);
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();

  if (norm <= kTheta9) {
    const Matrix A2 = A * A;
    if (norm <= kTheta3) {
      const Matrix U = A * (A2 + 60.0 * I);
      const Matrix V = 12.0 * A2 + 120.0 * I;
      return pade_solve(U, V);
    }
    const Matrix A4 = A2 * A2;
    if (norm <= kTheta5) {
      const Matrix U = A * (A4 + 420.0 * A2 + 15120.0 * I);
      const Matrix V = 30.0 * A4 + 3360.0 * A2 + 30240.0 * I;
      return pade_solve(U, V);
    }
    const Matrix A6 = A4 * A2;
    if (norm <= kTheta7) {
      const Matrix U = A * (A6 + 1512.0 * A4 + 277200.0 * A2 + 8648640.0 * I);
      const Matrix V = 56.0 * A6 + 25200.0 * A4 + 1995840.0 * A2 + 17297280.0 * I;
      return pade_solve(U, V);
    }
    const Matrix A8 = A4 * A4;
    const Matrix U =
        A * (A8 + 3960.0 * A6 + 2162160.0 * A4 + 302702400.0 * A2 +
             8821612800.0 * I);
    const Matrix V = 90.0 * A8 + 110880.0 * A6 + 30270240.0 * A4 +
                     2075673600.0 * A2 + 17643225600.0 * I;
    return pade_solve(U, V);
  }

  // Order 13 with scaling and squaring. A non-finite or astronomically large
  // norm gets the squaring cap; garbage then propagates to the result, which
  // is what callers watching for blow-up expect.
  int s = 1024;
  if (std::isfinite(norm)) {
    const int raw = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    s = std::clamp(raw, 0, 1024);
  }
  const Matrix As = A * std::ldexp(1.0, -s);
  const Matrix A2 = As * As;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;

  const double b[] = {64764752532480000.0, 32382376266240000.0,
                      7771770303897600.0,  1187353796428800.0,
                      129060195264000.0,   10559470521600.0,
                      670442572800.0,      33522128640.0,
                      1323241920.0,        40840800.0,
                      960960.0,            16380.0,
                      182.0,               1.0};
  const Matrix U =
      As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
            b[5] * A4 + b[3] * A2 + b[1] * I);
  const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                   b[4] * A4 + b[2] * A2 + b[0] * I;

  Matrix R = pade_solve(U, V);
  for (int i = 0; i < s; ++i) R = R * R;
  return R;
}

Vector lstsq(const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) {
    throw DimensionError("lstsq: X has " + std::to_string(X.rows()) +
                         " rows but y has " + std::to_string(y.size()) +
                         " entries");
  }
  if (X.rows() < X.cols()) {
    throw DimensionError("lstsq: underdetermined system, " +
                         std::to_string(X.rows()) + " rows < " +
                         std::to_string(X.cols()) + " columns");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  if (qr.rank() < X.cols()) {
    throw RankDeficiencyError(
        "lstsq: rank-deficient matrix, numerical rank " +
            std::to_string(qr.rank()) + " < " + std::to_string(X.cols()) +
            " columns",
        qr.rank(), X.cols());
  }
  return qr.solve(y);
}

Vector constrained_lstsq(const Matrix& X, const Vector& y, const Matrix& A,
                         const Vector& c) {
  if (X.rows() != y.size()) {
    throw DimensionError("constrained_lstsq: X has " +
                         std::to_string(X.rows()) + " rows but y has " +
                         std::to_string(y.size()) + " entries");
  }
  if (A.rows() != c.size()) {
    throw DimensionError("constrained_lstsq: A has " +
                         std::to_string(A.rows()) + " rows but c has " +
                         std::to_string(c.size()) + " entries");
  }
  if (A.rows() == 0) return lstsq(X, y);
  if (A.cols() != X.cols()) {
    throw DimensionError("constrained_lstsq: X has " +
                         std::to_string(X.cols()) + " columns but A has " +
                         std::to_string(A.cols()));
  }

  const Eigen::Index nb = X.cols();
  const Eigen::Index mc = A.rows();
  Matrix K(nb + mc, nb + mc);
  K.topLeftCorner(nb, nb) = X.transpose() * X;
  K.topRightCorner(nb, mc) = A.transpose();
  K.bottomLeftCorner(mc, nb) = A;
  K.bottomRightCorner(mc, mc).setZero();

  Vector rhs(nb + mc);
  rhs.head(nb) = X.transpose() * y;
  rhs.tail(mc) = c;

  Eigen::ColPivHouseholderQR<Matrix> qr(K);
  if (qr.rank() < K.rows()) {
    throw SingularConstraintError(
        "constrained_lstsq: singular KKT system (numerical rank " +
        std::to_string(qr.rank()) + " of " + std::to_string(K.rows()) + ")");
  }
  return qr.solve(rhs).head(nb);
}

}  // namespace msll
