#pragma once

// Motor pattern generation: two-neuron SO(2)-type oscillator, post-processing
// into a stance/swing trapezoid, and per-leg delay taps that set the gait.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hexfm/common.hpp"

namespace hexfm {

/// Valid range of the modulatory input.
inline constexpr double kMiMin = 0.0;
inline constexpr double kMiMax = 1.0;
/// Backbone joint rest angle in degrees.
inline constexpr double kBjRestDeg = -2.0;

struct CpgState {
  double o1 = 0.1;
  double o2 = 0.0;
  double alpha = 1.01;
};

/// Rotation angle per tick; increasing in MI.
constexpr double cpg_phase_step(double mi) { return 0.02 + 0.5 * mi; }

void cpg_step(CpgState& state, double mi);

/// Mean oscillation period (ticks) at fixed MI, from interpolated upward zero
/// crossings of o1 after a transient.
double measure_cpg_period(double mi, int ticks = 20000, int transient = 1000);

/// MI whose measured period equals `period` (bisection on measure_cpg_period).
double mi_for_period(double period);

/// Stance/swing trapezoid at cycle phase in [0, 1): −1 for phase in
/// [0, duty), +1 otherwise, with linear ramps centred on both transitions.
double pcpg_trapezoid(double phase, double duty, double ramp_width = 0.1);

/// Post-processing unit. Locks onto upward zero crossings of the oscillator
/// output and emits the trapezoid for the elapsed fraction of the last
/// measured cycle. Until a full cycle has been seen it passes the input
/// through (clipped to [−1, 1]).
class PcpgShaper {
 public:
  double step(double o, double duty);
  int period() const { return period_; }

 private:
  double previous_ = 0.0;
  bool seen_crossing_ = false;
  int ticks_since_crossing_ = 0;
  int period_ = 0;
};

/// Fixed-length delay line over a ring buffer. `step` pushes a sample and
/// returns the one pushed `delay` ticks earlier (zero before that many
/// samples were seen). `tap` reads other delays up to the capacity.
class DelayLine {
 public:
  explicit DelayLine(int delay = 0, int capacity = 0);

  double step(double sample);
  double tap(int delay) const;

  int delay() const { return delay_; }
  int capacity() const { return static_cast<int>(buffer_.size()) - 1; }
  void set_delay(int delay);

 private:
  std::vector<double> buffer_;
  std::size_t head_ = 0;
  int delay_ = 0;
};

struct GaitSpec {
  double mi = 0.0;
  int period = 0;        // ticks
  double duty = 0.5;     // stance fraction
  std::array<double, kNumLegs> offsets{};  // phase lag per leg, fraction of period
  std::array<int, kNumLegs> delays{};      // = round(offset · period)
};

struct GaitTable {
  std::array<GaitSpec, kNumGaits> gaits{};

  const GaitSpec& operator[](Gait g) const { return gaits[index(g)]; }
  GaitSpec& operator[](Gait g) { return gaits[index(g)]; }

  /// Fills `delays` from offsets and periods.
  void derive_delays();
  void validate() const;
  int max_period() const;

  /// Wave 100 ticks / duty 5/6, tetrapod 60 / 2/3, caterpillar 40 / 1/2.
  static GaitTable defaults();
};

struct LegCommand {
  double tc = 0.0;
  double ctr = 0.0;
  double fti = 0.0;
};

/// Adaptive joint offsets added on top of the CPG program.
struct LegOffsets {
  double ctr = 0.0;
  double tc = 0.0;
  double fti = 0.0;
};

struct MotorFrame {
  std::array<LegCommand, kNumLegs> legs{};   // CPG program (efference copy)
  std::array<LegOffsets, kNumLegs> offsets{};
  double bj_deg = kBjRestDeg;

  /// Program plus offsets, clipped to the joint range.
  LegCommand commanded(Leg leg) const;
  bool in_stance(Leg leg) const { return legs[index(leg)].ctr < 0.0; }
};

/// CPG → PCPG → delay taps for all legs.
class MotorPipeline {
 public:
  explicit MotorPipeline(GaitTable table = GaitTable::defaults());

  MotorFrame step(Gait gait);
  void warm_up(Gait gait, int ticks);

  const GaitTable& table() const { return table_; }
  const CpgState& cpg() const { return cpg_; }

 private:
  GaitTable table_;
  CpgState cpg_{};
  PcpgShaper shaper_{};
  DelayLine history_;
};

using GaitDiagram = Eigen::Matrix<std::uint8_t, kNumLegs, Eigen::Dynamic>;

/// Stance (1) / swing (0) per leg and tick, from the sign of the CTr program.
GaitDiagram gait_diagram(std::span<const MotorFrame> frames);

}  // namespace hexfm
