#pragma once

// Self-adaptive reservoir: leaky discrete-time rate neurons with per-neuron
// transfer gain/shift (intrinsic plasticity) and per-neuron time constants.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hexfm/common.hpp"
#include "hexfm/linalg.hpp"

namespace hexfm {

template <typename Scalar = double>
struct ReservoirParams {
  int neurons = 30;
  Scalar recurrent_scale = Scalar(0.95);  // g
  Scalar connectivity = Scalar(0.2);      // p_c
  Scalar dt = Scalar(1);                  // one controller tick
  Scalar tau0 = Scalar(2);
  Scalar tau_max_factor = Scalar(50);     // tau is kept in [dt, factor·dt]
  Scalar input_weight_range = Scalar(0.1);
  Scalar bias_range = Scalar(1);
  std::uint64_t seed = 7;

  void validate() const {
    if (neurons < 1) throw ConfigError("reservoir.neurons must be >= 1");
    if (!(connectivity > 0 && connectivity <= 1))
      throw ConfigError("reservoir.connectivity must be in (0, 1]");
    if (!(recurrent_scale > 0)) throw ConfigError("reservoir.g must be > 0");
    if (!(dt > 0)) throw ConfigError("reservoir.dt must be > 0");
    if (!(tau0 >= dt)) throw ConfigError("reservoir.tau0 must be >= dt");
    if (!(tau_max_factor * dt >= tau0))
      throw ConfigError("reservoir.tau_max_factor must allow tau0");
    if (!(input_weight_range >= 0)) throw ConfigError("reservoir.input_weight_range must be >= 0");
    if (!(bias_range >= 0)) throw ConfigError("reservoir.bias_range must be >= 0");
  }
};

template <typename Scalar = double>
struct ReservoirState {
  using VectorType = Vector<Scalar>;
  using SparseType = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  VectorType potential;  // x
  VectorType rate;       // r = tanh(gain ∘ x + shift)
  VectorType gain;       // a
  VectorType shift;      // b
  VectorType tau;
  SparseType w_rec;
  VectorType w_in;
  VectorType bias;       // auxiliary bias B

  Scalar recurrent_scale = Scalar(0.95);
  Scalar dt = Scalar(1);
  Scalar tau_min = Scalar(1);
  Scalar tau_max = Scalar(50);

  int size() const { return static_cast<int>(potential.size()); }

  /// Zeroes the dynamic state; weights and adapted parameters are kept.
  void reset() {
    potential.setZero();
    rate.setZero();
  }
};

template <typename Scalar>
ReservoirState<Scalar> init_reservoir(const ReservoirParams<Scalar>& params) {
  params.validate();
  const int n = params.neurons;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<Scalar> input_dist(-params.input_weight_range,
                                                    params.input_weight_range);
  std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
  std::normal_distribution<Scalar> weight_dist(
      Scalar(0), Scalar(1) / std::sqrt(params.connectivity * Scalar(n)));
  std::uniform_real_distribution<Scalar> bias_dist(-params.bias_range, params.bias_range);

  ReservoirState<Scalar> s;
  s.recurrent_scale = params.recurrent_scale;
  s.dt = params.dt;
  s.tau_min = params.dt;
  s.tau_max = params.tau_max_factor * params.dt;

  s.w_in.resize(n);
  for (int i = 0; i < n; ++i) s.w_in[i] = input_dist(rng);

  std::vector<Eigen::Triplet<Scalar>> entries;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (unit(rng) < params.connectivity) entries.emplace_back(i, j, weight_dist(rng));
    }
  }
  s.w_rec.resize(n, n);
  s.w_rec.setFromTriplets(entries.begin(), entries.end());
  s.w_rec.makeCompressed();

  s.bias.resize(n);
  for (int i = 0; i < n; ++i) s.bias[i] = bias_dist(rng);

  s.potential = Vector<Scalar>::Zero(n);
  s.rate = Vector<Scalar>::Zero(n);
  s.gain = Vector<Scalar>::Ones(n);
  s.shift = Vector<Scalar>::Zero(n);
  s.tau = Vector<Scalar>::Constant(n, params.tau0);
  return s;
}

/// Advances one tick: leaky integration of the recurrent, input and bias
/// drive, then the tanh transfer.
template <typename Scalar>
void reservoir_step(ReservoirState<Scalar>& s, Scalar u) {
  if (!std::isfinite(u)) throw InputError("reservoir_step: input is not finite");
  const auto leak = (s.dt / s.tau.array()).eval();
  const Vector<Scalar> drive = s.recurrent_scale * (s.w_rec * s.rate) + s.w_in * u + s.bias;
  s.potential = ((Scalar(1) - leak) * s.potential.array() + leak * drive.array()).matrix();
  s.rate = (s.gain.array() * s.potential.array() + s.shift.array()).tanh().matrix();
}

template <typename Scalar = double>
struct IpParams {
  Scalar eta = Scalar(1e-4);
  Scalar target_mean = Scalar(0.2);
  Scalar min_gain = Scalar(0.1);
};

/// Intrinsic plasticity: one gradient step moving each neuron's output,
/// read as y = (r + 1) / 2 in (0, 1), toward an exponential distribution with
/// the target mean. Uses the potential and rate of the current tick.
template <typename Scalar>
void ip_update(ReservoirState<Scalar>& s, const IpParams<Scalar>& ip) {
  if (!(ip.eta >= 0)) throw ConfigError("ip.eta must be >= 0");
  if (!(ip.target_mean > 0)) throw ConfigError("ip.target_mean must be > 0");
  if (ip.eta == 0) return;
  const Scalar mu = ip.target_mean;
  const auto y = ((s.rate.array() + Scalar(1)) * Scalar(0.5)).eval();
  const auto d_shift =
      (ip.eta * (Scalar(1) - (Scalar(2) + Scalar(1) / mu) * y + y.square() / mu)).eval();
  const auto d_gain = (ip.eta / s.gain.array() + s.potential.array() * d_shift).eval();
  s.gain = (s.gain.array() + d_gain).max(ip.min_gain).matrix();
  s.shift = (s.shift.array() + d_shift).matrix();
}

/// KL(empirical ‖ target) between the histogram of y = (r + 1) / 2 over all
/// entries of `rates` and an exponential density with mean `target_mean`,
/// truncated to [0, 1] and discretized on the same bins.
template <typename Derived>
typename Derived::Scalar rate_kl_divergence(const Eigen::MatrixBase<Derived>& rates,
                                            typename Derived::Scalar target_mean,
                                            int bins = 20) {
  using Scalar = typename Derived::Scalar;
  if (rates.size() == 0) throw InputError("rate_kl_divergence: no samples");
  std::vector<Scalar> p(bins, Scalar(0)), q(bins, Scalar(0));
  for (Eigen::Index k = 0; k < rates.size(); ++k) {
    const Scalar y = (rates.reshaped()(k) + Scalar(1)) * Scalar(0.5);
    int bin = static_cast<int>(y * Scalar(bins));
    bin = std::clamp(bin, 0, bins - 1);
    p[bin] += Scalar(1);
  }
  Scalar q_total = 0;
  for (int k = 0; k < bins; ++k) {
    const Scalar centre = (Scalar(k) + Scalar(0.5)) / Scalar(bins);
    q[k] = std::exp(-centre / target_mean);
    q_total += q[k];
  }
  const auto total = static_cast<Scalar>(rates.size());
  Scalar kl = 0;
  for (int k = 0; k < bins; ++k) {
    if (p[k] == 0) continue;
    const Scalar pk = p[k] / total;
    kl += pk * std::log(pk / (q[k] / q_total));
  }
  return kl;
}

/// Runs the reservoir from its current state over `inputs` and returns the
/// T×N rate history. The state is advanced in place.
template <typename Scalar>
Matrix<Scalar> collect_rates(ReservoirState<Scalar>& s, std::span<const Scalar> inputs) {
  Matrix<Scalar> rates(static_cast<Eigen::Index>(inputs.size()), s.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    reservoir_step(s, inputs[t]);
    rates.row(static_cast<Eigen::Index>(t)) = s.rate.transpose();
  }
  return rates;
}

template <typename Scalar = double>
struct PretrainOptions {
  int epochs = 20;
  int window = 1000;        // ticks per intrinsic-plasticity window
  int stride = 500;         // window start advance per epoch (overlapping windows)
  int washout = 50;
  int fit_ticks = 200;      // provisional readout: fit on this many ticks ...
  int validation_ticks = 200;  // ... then score on the following ones
  int settle_ticks = 200;   // skip this far into a label run before slicing
  Scalar tau_step = Scalar(0.2);
  Scalar ridge = Scalar(1e-4);
  IpParams<Scalar> ip{};
  std::uint64_t seed = 11;
};

template <typename Scalar = double>
struct PretrainReport {
  std::vector<Scalar> validation_mse;  // [0] before adaptation, then one per epoch
  std::vector<Scalar> kl;              // same indexing
  int accepted_tau_moves = 0;
  int rejected_ip_epochs = 0;
};

namespace detail {

template <typename Scalar>
struct ValidationSlice {
  std::size_t start = 0;
  std::size_t length = 0;
};

/// One slice per distinct label, taken from the first run of that label that
/// is long enough; falls back to the head of the log for short inputs.
template <typename Scalar>
std::vector<ValidationSlice<Scalar>> validation_slices(std::span<const int> labels,
                                                       std::size_t total,
                                                       const PretrainOptions<Scalar>& opt) {
  const std::size_t need =
      static_cast<std::size_t>(opt.washout + opt.fit_ticks + opt.validation_ticks);
  std::vector<ValidationSlice<Scalar>> slices;
  std::vector<int> seen;
  std::size_t run_start = 0;
  for (std::size_t t = 1; t <= total; ++t) {
    const bool run_ends = t == total || labels[t] != labels[run_start];
    if (!run_ends) continue;
    const int label = labels[run_start];
    const std::size_t run_len = t - run_start;
    const bool fresh = std::find(seen.begin(), seen.end(), label) == seen.end();
    if (fresh) {
      const std::size_t skip = static_cast<std::size_t>(opt.settle_ticks);
      if (run_len >= skip + need) {
        slices.push_back({run_start + skip, need});
        seen.push_back(label);
      } else if (run_len >= need) {
        slices.push_back({run_start, need});
        seen.push_back(label);
      }
    }
    run_start = t;
  }
  if (slices.empty()) slices.push_back({0, total});
  return slices;
}

template <typename Scalar>
Scalar validation_mse(const ReservoirState<Scalar>& base, std::span<const Scalar> inputs,
                      std::span<const Scalar> targets,
                      const std::vector<ValidationSlice<Scalar>>& slices,
                      const PretrainOptions<Scalar>& opt) {
  Scalar total = 0;
  for (const auto& slice : slices) {
    ReservoirState<Scalar> s = base;
    s.reset();
    const auto rates = collect_rates(s, inputs.subspan(slice.start, slice.length));
    const Eigen::Index washout = std::min<Eigen::Index>(opt.washout, rates.rows() / 4);
    const Eigen::Index usable = rates.rows() - washout;
    const Eigen::Index fit = std::max<Eigen::Index>(1, usable / 2);
    const Eigen::Index check = usable - fit;
    Eigen::Map<const Vector<Scalar>> d(targets.data() + slice.start, rates.rows());
    const Vector<Scalar> w = ridge_regression(rates.middleRows(washout, fit),
                                              d.segment(washout, fit), opt.ridge);
    const Eigen::Index from = check > 0 ? washout + fit : washout;
    const Eigen::Index count = check > 0 ? check : fit;
    const Vector<Scalar> residual = rates.middleRows(from, count) * w - d.segment(from, count);
    total += residual.squaredNorm() / Scalar(count);
  }
  return total / Scalar(slices.size());
}

}  // namespace detail

/// Pre-training of the reservoir non-linearities and time constants.
///
/// Each epoch runs intrinsic plasticity over one 1000-tick window (windows
/// overlap by `window - stride`) and then a coordinate search over the time
/// constants: each tau_i gets a random ±tau_step relative perturbation that is
/// kept only if the validation MSE of a provisional ridge readout does not
/// increase. The IP step of an epoch is subject to the same test, so the
/// recorded validation MSE is non-increasing. `labels` (optional) tags ticks
/// with a task id; the validation set holds one slice per distinct label.
/// On return the potential and rate are reset and gain, shift and tau are
/// the frozen pre-trained values.
template <typename Scalar>
PretrainReport<Scalar> pretrain_adapt(ReservoirState<Scalar>& s, std::span<const Scalar> inputs,
                                      std::span<const Scalar> targets,
                                      std::span<const int> labels,
                                      const PretrainOptions<Scalar>& opt) {
  if (inputs.empty()) throw InputError("pretrain_adapt: empty input sequence");
  if (targets.size() != inputs.size())
    throw InputError("pretrain_adapt: inputs and targets differ in length");
  if (!labels.empty() && labels.size() != inputs.size())
    throw InputError("pretrain_adapt: labels and inputs differ in length");
  if (opt.epochs < 0) throw ConfigError("pretrain.epochs must be >= 0");
  if (opt.window < 1 || opt.stride < 1) throw ConfigError("pretrain.window/stride must be >= 1");
  for (Scalar v : inputs)
    if (!std::isfinite(v)) throw InputError("pretrain_adapt: input is not finite");

  PretrainReport<Scalar> report;
  if (opt.epochs == 0) return report;

  const std::size_t total = inputs.size();
  const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(opt.window), total);
  const std::vector<int> flat_labels(labels.empty() ? total : 0, 0);
  const std::span<const int> tags = labels.empty() ? std::span<const int>(flat_labels) : labels;
  const auto slices = detail::validation_slices<Scalar>(tags, total, opt);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> coin(0, 1);

  auto probe_kl = [&](const ReservoirState<Scalar>& state) {
    ReservoirState<Scalar> probe = state;
    probe.reset();
    const auto rates = collect_rates(probe, inputs.first(window));
    const Eigen::Index washout = std::min<Eigen::Index>(opt.washout, rates.rows() / 4);
    return rate_kl_divergence(rates.bottomRows(rates.rows() - washout), opt.ip.target_mean);
  };

  Scalar best = detail::validation_mse(s, inputs, targets, slices, opt);
  report.validation_mse.push_back(best);
  report.kl.push_back(probe_kl(s));

  const std::size_t span_starts = total - window + 1;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    const std::size_t start = (static_cast<std::size_t>(epoch) * opt.stride) % span_starts;

    ReservoirState<Scalar> candidate = s;
    candidate.reset();
    for (std::size_t t = start; t < start + window; ++t) {
      reservoir_step(candidate, inputs[t]);
      if (t - start >= static_cast<std::size_t>(opt.washout)) ip_update(candidate, opt.ip);
    }
    const Scalar ip_mse = detail::validation_mse(candidate, inputs, targets, slices, opt);
    if (ip_mse <= best) {
      s.gain = candidate.gain;
      s.shift = candidate.shift;
      best = ip_mse;
    } else {
      ++report.rejected_ip_epochs;
    }

    for (int i = 0; i < s.size(); ++i) {
      const Scalar factor = coin(rng) ? Scalar(1) + opt.tau_step : Scalar(1) - opt.tau_step;
      const Scalar old_tau = s.tau[i];
      s.tau[i] = std::clamp(old_tau * factor, s.tau_min, s.tau_max);
      if (s.tau[i] == old_tau) continue;
      const Scalar mse = detail::validation_mse(s, inputs, targets, slices, opt);
      if (mse <= best) {
        best = mse;
        ++report.accepted_tau_moves;
      } else {
        s.tau[i] = old_tau;
      }
    }
    report.validation_mse.push_back(best);
    report.kl.push_back(probe_kl(s));
  }
  s.reset();
  return report;
}

/// Largest eigenvalue modulus by block power (subspace) iteration with a
/// Rayleigh-Ritz step on the projected matrix; a block is needed because
/// the dominant eigenvalues of a real non-symmetric matrix often come as a
/// complex-conjugate pair.
template <typename Derived>
typename Derived::Scalar spectral_radius_estimate(const Eigen::MatrixBase<Derived>& w,
                                                  typename Derived::Scalar tolerance = 1e-6,
                                                  int max_iterations = 100000) {
  using Scalar = typename Derived::Scalar;
  if (w.rows() != w.cols()) throw InputError("spectral_radius_estimate: matrix is not square");
  const Eigen::Index n = w.rows();
  if (n == 0) throw InputError("spectral_radius_estimate: empty matrix");
  const Matrix<Scalar> a = w;
  const Eigen::Index block = std::min<Eigen::Index>(n, 6);

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<Scalar> normal(0, 1);
  Matrix<Scalar> q(n, block);
  for (Eigen::Index k = 0; k < q.size(); ++k) q.data()[k] = normal(rng);
  q = Eigen::HouseholderQR<Matrix<Scalar>>(q).householderQ() * Matrix<Scalar>::Identity(n, block);

  Scalar previous = -1;
  int stable = 0;
  for (int it = 0; it < max_iterations; ++it) {
    const Matrix<Scalar> z = a * q;
    if (z.norm() == 0) return Scalar(0);
    const Matrix<Scalar> projected = q.transpose() * z;
    const Scalar estimate =
        Eigen::EigenSolver<Matrix<Scalar>>(projected, false).eigenvalues().cwiseAbs().maxCoeff();
    if (previous >= 0 && std::abs(estimate - previous) <= tolerance * std::max(estimate, Scalar(1e-300))) {
      if (++stable >= 3) return estimate;
    } else {
      stable = 0;
    }
    previous = estimate;
    q = Eigen::HouseholderQR<Matrix<Scalar>>(z).householderQ() * Matrix<Scalar>::Identity(n, block);
  }
  throw NumericError("spectral_radius_estimate: no convergence");
}

}  // namespace hexfm
