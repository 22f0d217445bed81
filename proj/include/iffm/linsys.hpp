#pragma once

// Linear intermediate subsystem  x' = A x + b u  with A Metzler and Hurwitz, b > 0.

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "iffm/errors.hpp"

namespace iffm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues must satisfy max Re(lambda) < -kHurwitzMargin.
inline constexpr double kHurwitzMargin = 1e-9;

inline double spectral_abscissa(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularMatrix, "eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().real().maxCoeff();
}

struct Propagation {
  Vector x;  ///< e^{At} x0 + u p
  Vector p;  ///< A^{-1}(e^{At} - I) b, the input sensitivity of x
};

class LinearSubsystem {
 public:
  /// Checks Metzler, Hurwitz and b > 0; throws iffm::Error with the offending entry.
  static LinearSubsystem validate(Matrix a, Vector b) {
    if (a.rows() != a.cols() || a.rows() == 0) {
      throw Error(ErrorCode::DimensionMismatch, "A must be square and nonempty");
    }
    if (b.size() != a.rows()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "b has dimension " + std::to_string(b.size()) + ", expected " +
                      std::to_string(a.rows()));
    }
    if (!a.allFinite() || !b.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "A and b must be finite");
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (i != j && a(i, j) < 0.0) {
          throw Error(ErrorCode::NotMetzler, "A(" + std::to_string(i) + "," + std::to_string(j) +
                                                 ") = " + std::to_string(a(i, j)) +
                                                 " is a negative off-diagonal entry");
        }
      }
    }
    const double abscissa = spectral_abscissa(a);
    if (!(abscissa < -kHurwitzMargin)) {
      throw Error(ErrorCode::NotHurwitz,
                  "spectral abscissa " + std::to_string(abscissa) + " is not below -1e-9");
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (!(b(i) > 0.0)) {
        throw Error(ErrorCode::NonPositiveInput,
                    "b(" + std::to_string(i) + ") = " + std::to_string(b(i)) + " is not positive");
      }
    }
    return LinearSubsystem(std::move(a), std::move(b), abscissa);
  }

  /// The scalar subsystem x' = -x + u used throughout the motif catalog.
  static LinearSubsystem unit_scalar() {
    return validate(Matrix::Constant(1, 1, -1.0), Vector::Constant(1, 1.0));
  }

  Eigen::Index dim() const { return a_.rows(); }
  const Matrix& A() const { return a_; }
  const Vector& b() const { return b_; }
  double abscissa() const { return abscissa_; }

  /// -A^{-1} b, the steady state per unit input. Nonnegative for Metzler+Hurwitz A.
  const Vector& unit_steady_state() const { return unit_ss_; }

  Vector steady_state(double u) const {
    if (!(u > 0.0) || !std::isfinite(u)) {
      throw Error(ErrorCode::InvalidArgument, "steady_state requires u > 0");
    }
    return unit_ss_ * u;
  }

  /// x(t) and p(t) from the exponential of the augmented matrix [[A, b], [0, 0]] t.
  Propagation propagate(double u, const Vector& x0, double t) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "propagate requires t >= 0");
    if (x0.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");
    const Eigen::Index n = dim();
    Matrix aug = Matrix::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = a_ * t;
    aug.topRightCorner(n, 1) = b_ * t;
    const Matrix e = aug.exp();
    Propagation out;
    out.p = e.topRightCorner(n, 1);
    out.x = e.topLeftCorner(n, n) * x0 + u * out.p;
    return out;
  }

  Matrix exp(double t) const { return Matrix(a_ * t).exp(); }

 private:
  LinearSubsystem(Matrix a, Vector b, double abscissa)
      : a_(std::move(a)), b_(std::move(b)), abscissa_(abscissa) {
    Eigen::PartialPivLU<Matrix> lu(a_);
    unit_ss_ = -lu.solve(b_);
    const double residual = (a_ * unit_ss_ + b_).norm();
    if (!unit_ss_.allFinite() || residual > 1e-8 * (1.0 + b_.norm())) {
      throw Error(ErrorCode::SingularMatrix, "A is numerically singular");
    }
  }

  Matrix a_;
  Vector b_;
  double abscissa_ = 0.0;
  Vector unit_ss_;
};

}  // namespace iffm
