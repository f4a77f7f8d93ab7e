#pragma once

// Online recursive-least-squares training of the three gait readouts.

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "hexfm/common.hpp"
#include "hexfm/linalg.hpp"

namespace hexfm {

/// Readout weights (N×3, one column per gait) and, per column, the running
/// inverse correlation matrix of the rates seen while that gait was active.
template <typename Scalar = double>
struct RlsState {
  std::array<Matrix<Scalar>, kNumGaits> inverse_correlation;
  Matrix<Scalar> w_out;
  Scalar delta_c = Scalar(1e-4);
  bool learning_enabled = true;

  int size() const { return static_cast<int>(w_out.rows()); }
  const Matrix<Scalar>& p(Gait g) const { return inverse_correlation[index(g)]; }
};

template <typename Scalar>
RlsState<Scalar> rls_init(int neurons, Scalar delta_c) {
  if (neurons < 1) throw ConfigError("rls.neurons must be >= 1");
  if (!(delta_c > 0)) throw ConfigError("rls.delta_c must be > 0");
  RlsState<Scalar> s;
  s.delta_c = delta_c;
  for (auto& p : s.inverse_correlation)
    p = Matrix<Scalar>::Identity(neurons, neurons) / delta_c;
  s.w_out = Matrix<Scalar>::Zero(neurons, kNumGaits);
  return s;
}

template <typename Scalar, typename Derived>
Scalar readout_predict(const RlsState<Scalar>& s, const Eigen::MatrixBase<Derived>& rate,
                       Gait gait) {
  if (rate.size() != s.w_out.rows()) throw InputError("readout_predict: dimension mismatch");
  return s.w_out.col(index(gait)).dot(rate);
}

template <typename Scalar>
struct RlsUpdate {
  Scalar prediction = 0;  // z, with the weights before the update
  Scalar error = 0;       // e = z - d
};

/// One RLS tick for the active gait column. The error uses the pre-update
/// weights; P is updated first and the weight step uses the updated P.
/// Columns of other gaits are never touched. With learning disabled the
/// prediction and error are returned and nothing changes.
template <typename Scalar, typename Derived>
RlsUpdate<Scalar> rls_step(RlsState<Scalar>& s, const Eigen::MatrixBase<Derived>& rate,
                           Scalar target, Gait gait) {
  if (rate.size() != s.w_out.rows()) throw InputError("rls_step: dimension mismatch");
  if (!std::isfinite(target) || !rate.allFinite())
    throw InputError("rls_step: non-finite rate or target");

  const int k = index(gait);
  RlsUpdate<Scalar> out;
  out.prediction = s.w_out.col(k).dot(rate);
  out.error = out.prediction - target;
  if (!s.learning_enabled) return out;

  Matrix<Scalar>& p = s.inverse_correlation[k];
  const Vector<Scalar> pr = p * rate;
  const Scalar denom = Scalar(1) + rate.dot(pr);
  p.noalias() -= (pr * pr.transpose()) / denom;
  p = (Scalar(0.5) * (p + p.transpose())).eval();
  s.w_out.col(k).noalias() -= out.error * (p * rate);
  return out;
}

/// Batch oracle: argmin_w ‖R w − D‖² + delta_c‖w‖², solved directly.
template <typename DerivedR, typename DerivedD>
Vector<typename DerivedR::Scalar> batch_ridge_oracle(const Eigen::MatrixBase<DerivedR>& rates,
                                                     const Eigen::MatrixBase<DerivedD>& targets,
                                                     typename DerivedR::Scalar delta_c) {
  if (rates.rows() < 1) throw InputError("batch_ridge_oracle: need at least one sample");
  if (delta_c < 0) throw ConfigError("batch_ridge_oracle: delta_c must be >= 0");
  return ridge_regression(rates, targets, delta_c);
}

}  // namespace hexfm
