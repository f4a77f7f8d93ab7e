#include "hexfm/adaptation.hpp"

#include <algorithm>
#include <cmath>

namespace hexfm {

ForwardModelBank make_bank(const ReservoirParams<double>& params, double delta_c) {
  ForwardModelBank bank;
  const auto prototype = init_reservoir(params);
  for (Leg leg : kAllLegs) {
    bank.reservoir(leg) = prototype;
    bank.readout(leg) = rls_init(params.neurons, delta_c);
  }
  return bank;
}

void ForwardModelBank::set_learning(bool enabled) {
  for (auto& r : readouts) r.learning_enabled = enabled;
}

void ForwardModelBank::reset_dynamics() {
  for (auto& r : reservoirs) r.reset();
  rf.fill(0.0);
}

double fm_predict_step(ForwardModelBank& bank, Leg leg, double u, Gait gait) {
  auto& res = bank.reservoir(leg);
  reservoir_step(res, u);
  bank.active = gait;
  const double z = readout_predict(bank.readout(leg), res.rate, gait);
  return bank.rf[index(leg)] = std::clamp(z, 0.0, 1.0);
}

double fm_train_step(ForwardModelBank& bank, Leg leg, double u, double target, Gait gait) {
  auto& res = bank.reservoir(leg);
  reservoir_step(res, u);
  bank.active = gait;
  if (bank.training_noise <= 0.0) {
    const auto upd = rls_step(bank.readout(leg), res.rate, target, gait);
    return bank.rf[index(leg)] = std::clamp(upd.prediction, 0.0, 1.0);
  }
  std::normal_distribution<double> noise(0.0, bank.training_noise);
  Vector<double> r = res.rate;
  for (auto& v : r) v += noise(bank.noise_rng);
  const auto upd = rls_step(bank.readout(leg), r, target, gait);
  return bank.rf[index(leg)] = std::clamp(upd.prediction, 0.0, 1.0);
}

double instantaneous_error(double rf, double fc) {
  if (!(rf >= 0.0 && rf <= 1.0 && fc >= 0.0 && fc <= 1.0))
    throw InputError("instantaneous_error: signals must lie in [0, 1]");
  return rf - fc;
}

void accumulate_step(AccumulatorPair& acc, double delta, Phase phase, double threshold) {
  if (!std::isfinite(delta)) throw InputError("accumulate_step: non-finite error");
  acc.stance_completed = false;
  if (phase != acc.phase) {
    if (phase == Phase::Swing) {
      acc.max_stance_error = acc.stance_peak;
      acc.stance_completed = true;
      acc.stance_peak = 0.0;
      acc.S = 0.0;
    } else {
      acc.max_swing_error = acc.swing_peak;
      acc.swing_peak = 0.0;
      acc.E = 0.0;
    }
    acc.phase = phase;
  }
  if (std::abs(delta) < threshold) return;
  if (phase == Phase::Stance) {
    acc.S += std::max(delta, 0.0);
    acc.stance_peak = std::max(acc.stance_peak, acc.S);
  } else {
    acc.E += std::max(-delta, 0.0);
    acc.swing_peak = std::max(acc.swing_peak, acc.E);
  }
}

double max_stance_error(std::span<const double> stance_trace) {
  if (stance_trace.empty()) throw InputError("max_stance_error: empty stance trace");
  return *std::max_element(stance_trace.begin(), stance_trace.end());
}

LegOffsets leg_offsets(const AccumulatorPair& acc, Phase phase, const OffsetGains& g) {
  LegOffsets off;
  if (phase == Phase::Stance) {
    off.ctr = -g.k_search * acc.S;
    off.fti = g.k_search * acc.S;
  } else {
    off.ctr = g.k_elevation * acc.E;
  }
  if (g.gap_mode) {
    const double held = g.k_search * acc.max_stance_error;
    off.tc = held;
    off.fti = std::max(off.fti, held);
  }
  off.ctr = std::clamp(off.ctr, -g.limit, g.limit);
  off.tc = std::clamp(off.tc, -g.limit, g.limit);
  off.fti = std::clamp(off.fti, -g.limit, g.limit);
  return off;
}

void BjParams::validate() const {
  if (!(threshold >= 0)) throw ConfigError("bj.threshold must be >= 0");
  if (!(gain_deg >= 0)) throw ConfigError("bj.gain must be >= 0");
  if (up_timeout < 1 || down_timeout < 1) throw ConfigError("bj timeouts must be >= 1");
  if (!(limit > 0)) throw ConfigError("bj.limit must be > 0");
  if (!(down_rate > 0)) throw ConfigError("bj.down_rate must be > 0");
  if (std::abs(down_angle) > limit) throw ConfigError("bj.down_angle outside the limit");
}

void bj_update(BjState& bj, double max_err_prev, bool stance_completed, const BjParams& p) {
  auto step_up = [&](double err) {
    const double before = bj.angle;
    bj.angle = std::clamp(bj.angle + p.gain_deg * err, -p.limit, p.limit);
    return bj.angle - before;
  };
  switch (bj.mode) {
    case BjMode::Normal:
      bj.angle = kBjRestDeg;
      if (stance_completed && max_err_prev > p.threshold) {
        bj.mode = BjMode::TiltUp;
        bj.timer = 0;
        ++bj.episodes;
        bj.first_increments.push_back(step_up(max_err_prev));
      }
      break;
    case BjMode::TiltUp:
      if (++bj.timer >= p.up_timeout) {
        bj.mode = BjMode::TiltDown;
        bj.timer = 0;
      } else if (stance_completed) {
        step_up(max_err_prev);
      }
      break;
    case BjMode::TiltDown:
      bj.angle = std::max(p.down_angle, bj.angle - p.down_rate);
      if (++bj.timer >= p.down_timeout) {
        bj.mode = BjMode::Normal;
        bj.timer = 0;
        bj.angle = kBjRestDeg;
      }
      break;
  }
}

BaselineModel make_baseline(int delay, double smoothing) {
  if (delay < 0) throw ConfigError("baseline.delay must be >= 0");
  if (!(smoothing >= 0 && smoothing < 1)) throw ConfigError("baseline.smoothing must be in [0, 1)");
  BaselineModel m;
  m.delay = delay;
  m.smoothing = smoothing;
  m.line = DelayLine(delay);
  return m;
}

double baseline_predict_step(BaselineModel& m, double u) {
  if (!std::isfinite(u)) throw InputError("baseline_predict_step: input is not finite");
  const double square = m.line.step(u < 0.0 ? 1.0 : 0.0);
  m.output = m.smoothing * m.output + (1.0 - m.smoothing) * square;
  return m.output;
}

int fit_baseline_delay(std::span<const double> u, std::span<const double> fc, int max_delay) {
  if (u.size() != fc.size() || u.empty()) throw InputError("fit_baseline_delay: bad streams");
  if (max_delay < 0) throw ConfigError("fit_baseline_delay: max_delay must be >= 0");
  // Stance onset in u to the next contact rising edge in fc.
  std::vector<int> delays;
  for (std::size_t t = 1; t < u.size(); ++t) {
    if (!(u[t] < 0.0 && u[t - 1] >= 0.0)) continue;
    for (std::size_t k = t; k < u.size() && k <= t + static_cast<std::size_t>(max_delay); ++k) {
      if (fc[k] > 0.5 && (k == 0 || fc[k - 1] <= 0.5)) {
        delays.push_back(static_cast<int>(k - t));
        break;
      }
    }
  }
  if (delays.empty()) return 0;
  std::nth_element(delays.begin(), delays.begin() + delays.size() / 2, delays.end());
  return delays[delays.size() / 2];
}

}  // namespace hexfm
