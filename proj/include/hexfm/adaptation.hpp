#pragma once

// Per-leg forward models, prediction-error accumulators, joint offsets, the
// backbone-joint state machine, and the fixed-delay baseline predictor.

#include <array>
#include <random>
#include <span>
#include <vector>

#include "hexfm/common.hpp"
#include "hexfm/cpg.hpp"
#include "hexfm/reservoir.hpp"
#include "hexfm/rls.hpp"

namespace hexfm {

/// Six identical reservoir forward models, one per leg.
struct ForwardModelBank {
  std::array<ReservoirState<double>, kNumLegs> reservoirs;
  std::array<RlsState<double>, kNumLegs> readouts;
  Gait active = Gait::Wave;
  std::array<double, kNumLegs> rf{};
  double training_noise = 0.0;  // std of the perturbation on rates seen by RLS
  std::mt19937_64 noise_rng{0};

  ReservoirState<double>& reservoir(Leg leg) { return reservoirs[index(leg)]; }
  RlsState<double>& readout(Leg leg) { return readouts[index(leg)]; }
  void set_learning(bool enabled);
  void reset_dynamics();
};

ForwardModelBank make_bank(const ReservoirParams<double>& params, double delta_c);

/// Advances leg's reservoir with the efference copy u and returns the active
/// gait readout clipped to [0, 1].
double fm_predict_step(ForwardModelBank& bank, Leg leg, double u, Gait gait);

/// Same as fm_predict_step but also runs one RLS update toward `target`.
/// Returns the clipped prediction made before the update.
double fm_train_step(ForwardModelBank& bank, Leg leg, double u, double target, Gait gait);

/// Positive when expected contact is missing, negative on unexpected contact.
double instantaneous_error(double rf, double fc);

enum class Phase { Stance, Swing };

struct AccumulatorPair {
  double S = 0.0;  // searching, stance only
  double E = 0.0;  // elevation, swing only
  Phase phase = Phase::Swing;

  double stance_peak = 0.0;       // running max of S in the current stance
  double swing_peak = 0.0;
  double max_stance_error = 0.0;  // held: peak of the last completed stance
  double max_swing_error = 0.0;
  bool stance_completed = false;  // true on the first swing tick after a stance
};

/// Errors smaller than this in magnitude are not accumulated.
inline constexpr double kDefaultErrorThreshold = 0.5;

/// Integrates delta into S (stance, positive part) or E (swing, negative
/// part). S resets on entering swing, E on entering stance.
void accumulate_step(AccumulatorPair& acc, double delta, Phase phase,
                     double threshold = kDefaultErrorThreshold);

/// Maximum of S over one stance trace.
double max_stance_error(std::span<const double> stance_trace);

struct OffsetGains {
  double k_search = 0.1;
  double k_elevation = 0.1;
  double limit = 0.5;
  bool gap_mode = false;  // extend TC/FTi from the held stance error
};

LegOffsets leg_offsets(const AccumulatorPair& acc, Phase phase, const OffsetGains& gains);

enum class BjMode { Normal, TiltUp, TiltDown };

struct BjParams {
  double threshold = 1.0;
  double gain_deg = 0.5;     // degrees per unit error, per completed stance
  int up_timeout = 170;
  int down_timeout = 50;
  double down_angle = -10.0;
  double down_rate = 2.0;    // degrees per tick during the downward sweep
  double limit = 30.0;

  void validate() const;
};

struct BjState {
  double angle = kBjRestDeg;
  BjMode mode = BjMode::Normal;
  int timer = 0;
  int episodes = 0;
  std::vector<double> first_increments;  // one per episode
};

/// One tick. `stance_completed` marks a tick on which the driving legs
/// finished a stance; `max_err_prev` is their held error from that step.
void bj_update(BjState& bj, double max_err_prev, bool stance_completed, const BjParams& params);

/// Thresholded, fixed-delay square wave followed by a first-order low-pass.
struct BaselineModel {
  int delay = 0;
  double smoothing = 0.9;
  DelayLine line;
  double output = 0.0;
};

BaselineModel make_baseline(int delay, double smoothing = 0.9);
double baseline_predict_step(BaselineModel& model, double u);

/// Median delay from stance onset in u (falling through 0) to the next
/// contact rising edge, searching at most max_delay ticks ahead.
int fit_baseline_delay(std::span<const double> u, std::span<const double> fc, int max_delay);

}  // namespace hexfm
