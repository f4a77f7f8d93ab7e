#include "hexfm/cpg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hexfm {

std::string_view gait_name(Gait g) {
  switch (g) {
    case Gait::Wave: return "wave";
    case Gait::Tetrapod: return "tetrapod";
    case Gait::Caterpillar: return "caterpillar";
  }
  return "?";
}

std::string_view leg_name(Leg l) {
  static constexpr std::array<std::string_view, kNumLegs> names{"R1", "R2", "R3",
                                                                "L1", "L2", "L3"};
  return names[index(l)];
}

Gait parse_gait(std::string_view name) {
  for (Gait g : kAllGaits)
    if (gait_name(g) == name) return g;
  throw ConfigError("unknown gait '" + std::string(name) + "'");
}

void cpg_step(CpgState& s, double mi) {
  if (!std::isfinite(mi) || mi < kMiMin || mi > kMiMax)
    throw ConfigError("cpg: MI " + std::to_string(mi) + " outside [0, 1]");
  const double phi = cpg_phase_step(mi);
  const double c = s.alpha * std::cos(phi);
  const double k = s.alpha * std::sin(phi);
  const double o1 = std::tanh(c * s.o1 + k * s.o2);
  const double o2 = std::tanh(-k * s.o1 + c * s.o2);
  s.o1 = o1;
  s.o2 = o2;
}

double measure_cpg_period(double mi, int ticks, int transient) {
  CpgState s;
  double first = -1.0;
  double last = -1.0;
  int crossings = 0;
  double previous = s.o1;
  for (int t = 0; t < ticks; ++t) {
    cpg_step(s, mi);
    if (t >= transient && previous < 0.0 && s.o1 >= 0.0) {
      const double at = (t - 1) + (-previous) / (s.o1 - previous);
      if (crossings == 0) first = at;
      last = at;
      ++crossings;
    }
    previous = s.o1;
  }
  if (crossings < 2) throw NumericError("measure_cpg_period: oscillator did not cycle");
  return (last - first) / (crossings - 1);
}

double mi_for_period(double period) {
  if (!(period > 2.0)) throw ConfigError("gait period must be > 2 ticks");
  double lo = kMiMin;
  double hi = kMiMax;
  if (measure_cpg_period(hi) > period || measure_cpg_period(lo) < period)
    throw ConfigError("gait period " + std::to_string(period) + " not reachable with MI in [0, 1]");
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (measure_cpg_period(mid) > period)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double pcpg_trapezoid(double phase, double duty, double ramp_width) {
  const double half = 0.5 * std::min({ramp_width, duty, 1.0 - duty});
  auto wrapped = [](double d) {
    d -= std::floor(d);
    return d >= 0.5 ? d - 1.0 : d;
  };
  const double to_stance = wrapped(phase);
  const double to_swing = wrapped(phase - duty);
  if (half > 0.0) {
    if (std::abs(to_stance) < half) return -to_stance / half;
    if (std::abs(to_swing) < half) return to_swing / half;
  }
  const double p = phase - std::floor(phase);
  return p < duty ? -1.0 : 1.0;
}

double PcpgShaper::step(double o, double duty) {
  if (!(duty > 0.0 && duty < 1.0)) throw ConfigError("pcpg: duty must be in (0, 1)");
  const bool crossing = previous_ < 0.0 && o >= 0.0;
  previous_ = o;
  if (crossing) {
    if (seen_crossing_) period_ = ticks_since_crossing_ + 1;
    seen_crossing_ = true;
    ticks_since_crossing_ = 0;
  } else if (seen_crossing_) {
    ++ticks_since_crossing_;
  }
  if (period_ == 0) return std::clamp(o, -1.0, 1.0);
  // Sample at tick centres so no tick lands exactly on a transition.
  const double phase = (ticks_since_crossing_ + 0.5) / period_;
  return pcpg_trapezoid(phase, duty);
}

DelayLine::DelayLine(int delay, int capacity) {
  if (delay < 0) throw ConfigError("delay line: negative delay");
  capacity = std::max(capacity, delay);
  buffer_.assign(static_cast<std::size_t>(capacity) + 1, 0.0);
  delay_ = delay;
}

void DelayLine::set_delay(int delay) {
  if (delay < 0 || delay > capacity())
    throw ConfigError("delay line: delay " + std::to_string(delay) + " exceeds capacity");
  delay_ = delay;
}

double DelayLine::step(double sample) {
  head_ = (head_ + 1) % buffer_.size();
  buffer_[head_] = sample;
  return tap(delay_);
}

double DelayLine::tap(int delay) const {
  if (delay < 0 || delay > capacity()) throw ConfigError("delay line: tap beyond capacity");
  const std::size_t n = buffer_.size();
  return buffer_[(head_ + n - static_cast<std::size_t>(delay)) % n];
}

void GaitTable::derive_delays() {
  for (auto& g : gaits)
    for (int leg = 0; leg < kNumLegs; ++leg)
      g.delays[leg] = static_cast<int>(std::lround(g.offsets[leg] * g.period));
}

void GaitTable::validate() const {
  for (Gait gait : kAllGaits) {
    const GaitSpec& g = (*this)[gait];
    const std::string name(gait_name(gait));
    if (g.period < 4) throw ConfigError("gait." + name + ".period must be >= 4");
    if (!(g.duty > 0.0 && g.duty < 1.0)) throw ConfigError("gait." + name + ".duty must be in (0, 1)");
    if (!(g.mi >= kMiMin && g.mi <= kMiMax)) throw ConfigError("gait." + name + ".mi outside [0, 1]");
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (!(g.offsets[leg] >= 0.0 && g.offsets[leg] < 1.0))
        throw ConfigError("gait." + name + ".offsets must be in [0, 1)");
      if (g.delays[leg] < 0 || g.delays[leg] >= g.period)
        throw ConfigError("gait." + name + ".delays must be in [0, period)");
    }
  }
}

int GaitTable::max_period() const {
  int p = 0;
  for (const auto& g : gaits) p = std::max(p, g.period);
  return p;
}

GaitTable GaitTable::defaults() {
  GaitTable t;
  // MI values calibrated with mi_for_period(100 / 60 / 40).
  t[Gait::Wave] = {0.08592522262107444, 100, 5.0 / 6.0,
                   // R1     R2         R3   L1         L2         L3
                   {2.0 / 6, 1.0 / 6, 0.0, 5.0 / 6, 4.0 / 6, 3.0 / 6}, {}};
  t[Gait::Tetrapod] = {0.1695951636997048, 60, 2.0 / 3.0,
                       {0.0, 1.0 / 3, 2.0 / 3, 2.0 / 3, 0.0, 1.0 / 3}, {}};
  t[Gait::Caterpillar] = {0.27426113732339275, 40, 0.5,
                          {0.0, 1.0 / 3, 2.0 / 3, 0.0, 1.0 / 3, 2.0 / 3}, {}};
  t.derive_delays();
  return t;
}

LegCommand MotorFrame::commanded(Leg leg) const {
  const LegCommand& base = legs[index(leg)];
  const LegOffsets& off = offsets[index(leg)];
  return {std::clamp(base.tc + off.tc, -1.0, 1.0), std::clamp(base.ctr + off.ctr, -1.0, 1.0),
          std::clamp(base.fti + off.fti, -1.0, 1.0)};
}

MotorPipeline::MotorPipeline(GaitTable table)
    : table_(std::move(table)), history_(0, 2 * table_.max_period()) {
  table_.validate();
}

MotorFrame MotorPipeline::step(Gait gait) {
  const GaitSpec& spec = table_[gait];
  cpg_step(cpg_, spec.mi);
  history_.step(shaper_.step(cpg_.o1, spec.duty));

  // TC leads CTr by a quarter period; on a periodic signal that is the same
  // as lagging by three quarters.
  const int tc_lag = static_cast<int>(std::lround(0.75 * spec.period));
  MotorFrame frame;
  for (Leg leg : kAllLegs) {
    const int d = spec.delays[index(leg)];
    LegCommand& cmd = frame.legs[index(leg)];
    cmd.ctr = history_.tap(d);
    cmd.tc = history_.tap(d + tc_lag);
    cmd.fti = -cmd.ctr;
  }
  return frame;
}

void MotorPipeline::warm_up(Gait gait, int ticks) {
  for (int t = 0; t < ticks; ++t) step(gait);
}

GaitDiagram gait_diagram(std::span<const MotorFrame> frames) {
  GaitDiagram d(kNumLegs, static_cast<Eigen::Index>(frames.size()));
  for (std::size_t t = 0; t < frames.size(); ++t)
    for (Leg leg : kAllLegs)
      d(index(leg), static_cast<Eigen::Index>(t)) = frames[t].in_stance(leg) ? 1 : 0;
  return d;
}

}  // namespace hexfm
