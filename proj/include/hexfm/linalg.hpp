#pragma once

#include <Eigen/Dense>

#include "hexfm/common.hpp"

namespace hexfm {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Solves (AᵀA + lambda·I) w = Aᵀb directly.
///
/// Throws NumericError when the regularized normal matrix is numerically
/// singular (possible only for lambda == 0 with rank-deficient A).
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> ridge_regression(const Eigen::MatrixBase<DerivedA>& a,
                                                   const Eigen::MatrixBase<DerivedB>& b,
                                                   typename DerivedA::Scalar lambda) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != b.rows()) throw InputError("ridge_regression: row count mismatch");
  if (a.rows() == 0) throw InputError("ridge_regression: empty system");
  const Eigen::Index n = a.cols();
  Matrix<Scalar> normal = a.transpose() * a;
  normal.diagonal().array() += lambda;
  const Vector<Scalar> rhs = a.transpose() * b;

  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(normal);
  qr.setThreshold(Scalar(1e-13));
  if (qr.rank() < n) throw NumericError("ridge_regression: singular normal matrix");
  return qr.solve(rhs);
}

}  // namespace hexfm
