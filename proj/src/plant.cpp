#include "hexfm/plant.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hexfm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError("terrain: bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

TerrainSpec TerrainSpec::parse(std::string_view text, double start) {
  TerrainSpec t;
  t.start = start;
  if (trim(text).empty()) throw ConfigError("terrain.segments is empty");
  for (std::string_view item : split(text, ',')) {
    const auto f = split(item, ':');
    const std::string_view kind = f[0];
    auto arg = [&](std::size_t k, std::string_view what, double fallback) {
      return k < f.size() ? number(f[k], what) : fallback;
    };
    Segment s;
    if (kind == "flat") {
      if (f.size() != 2) throw ConfigError("terrain: flat takes flat:length");
      s.kind = SegmentKind::Flat;
      s.length = arg(1, "flat length", 0);
    } else if (kind == "gap") {
      if (f.size() != 2) throw ConfigError("terrain: gap takes gap:length");
      s.kind = SegmentKind::Gap;
      s.length = arg(1, "gap length", 0);
    } else if (kind == "rough") {
      if (f.size() < 2 || f.size() > 4) throw ConfigError("terrain: rough takes rough:length[:height[:elasticity]]");
      s.kind = SegmentKind::Rough;
      s.length = arg(1, "rough length", 0);
      s.height = arg(2, "rough height", 8.0);
      s.elasticity = arg(3, "rough elasticity", 1.0);
    } else if (kind == "obstacle") {
      if (f.size() < 2 || f.size() > 3) throw ConfigError("terrain: obstacle takes obstacle:height[:width]");
      s.kind = SegmentKind::Obstacle;
      s.height = arg(1, "obstacle height", 0);
      s.length = arg(2, "obstacle width", 20.0);
    } else if (kind == "stairs") {
      if (f.size() != 3) throw ConfigError("terrain: stairs takes stairs:height:count");
      s.kind = SegmentKind::Stairs;
      s.height = arg(1, "step height", 0);
      const double count = arg(2, "step count", 0);
      if (count < 1 || count != std::floor(count)) throw ConfigError("terrain: step count must be a positive integer");
      s.count = static_cast<int>(count);
      s.length = s.count * PlantParams{}.body_length;
    } else {
      throw ConfigError("terrain: unknown segment kind '" + std::string(kind) + "'");
    }
    t.segments.push_back(s);
  }
  t.layout();
  t.validate();
  return t;
}

std::string TerrainSpec::to_string() const {
  std::string out;
  for (const auto& s : segments) {
    if (!out.empty()) out += ", ";
    switch (s.kind) {
      case SegmentKind::Flat: out += "flat:" + fmt(s.length); break;
      case SegmentKind::Gap: out += "gap:" + fmt(s.length); break;
      case SegmentKind::Rough:
        out += "rough:" + fmt(s.length) + ":" + fmt(s.height) + ":" + fmt(s.elasticity);
        break;
      case SegmentKind::Obstacle: out += "obstacle:" + fmt(s.height) + ":" + fmt(s.length); break;
      case SegmentKind::Stairs: out += "stairs:" + fmt(s.height) + ":" + std::to_string(s.count); break;
    }
  }
  return out;
}

void TerrainSpec::layout() {
  double x = start;
  for (auto& s : segments) {
    s.start = x;
    x += s.length;
  }
}

void TerrainSpec::validate() const {
  if (segments.empty()) throw ConfigError("terrain: no segments");
  double x = start;
  for (const auto& s : segments) {
    if (!(s.length > 0)) throw ConfigError("terrain: segment length must be > 0");
    if (std::abs(s.start - x) > 1e-9) throw ConfigError("terrain: segments must be contiguous and sorted");
    if (s.kind == SegmentKind::Rough || s.kind == SegmentKind::Obstacle || s.kind == SegmentKind::Stairs)
      if (!(s.height >= 0)) throw ConfigError("terrain: height must be >= 0");
    if (s.kind == SegmentKind::Rough && !(s.elasticity >= 1.0))
      throw ConfigError("terrain: elasticity must be >= 1");
    x = s.end();
  }
}

const Segment* TerrainSpec::segment_at(double x) const {
  for (const auto& s : segments)
    if (x >= s.start && x < s.end()) return &s;
  return nullptr;
}

const Segment* TerrainSpec::gap_at(double x) const {
  for (const auto& s : segments)
    if (s.kind == SegmentKind::Gap && x > s.start && x < s.end()) return &s;
  return nullptr;
}

double TerrainSpec::goal() const {
  for (auto it = segments.rbegin(); it != segments.rend(); ++it)
    if (it->kind != SegmentKind::Flat) return it->end();
  return end();
}

double TerrainSpec::end() const { return segments.empty() ? start : segments.back().end(); }

std::vector<TerrainSpec::Face> TerrainSpec::faces(const PlantParams& pp) const {
  std::vector<Face> out;
  for (const auto& s : segments) {
    switch (s.kind) {
      case SegmentKind::Obstacle: out.push_back({s.start, s.height}); break;
      case SegmentKind::Stairs:
        for (int k = 0; k < s.count; ++k) out.push_back({s.start + k * pp.body_length, s.height});
        break;
      case SegmentKind::Rough:
        for (double x = s.start + 0.5 * pp.bump_spacing; x + pp.bump_width <= s.end();
             x += pp.bump_spacing)
          out.push_back({x, s.height});
        break;
      default: break;
    }
  }
  return out;
}

void PlantParams::validate() const {
  if (!(body_length > 0)) throw ConfigError("plant.body_length must be > 0");
  if (!(leg_length > 0)) throw ConfigError("plant.leg_length must be > 0");
  if (!(step_advance >= 0)) throw ConfigError("plant.step_advance must be >= 0");
  if (min_support_legs < 1 || min_support_legs > kNumLegs)
    throw ConfigError("plant.min_support_legs must be in [1, 6]");
  if (!(dropout_probability >= 0 && dropout_probability <= 1))
    throw ConfigError("plant.dropout_probability must be in [0, 1]");
  for (int l : lag)
    if (l < 0) throw ConfigError("plant.lag must be >= 0");
}

int lag_model(Gait gait, const PlantParams& params) { return params.lag[index(gait)]; }

PlantState init_plant(const PlantParams& params, double body_x) {
  params.validate();
  PlantState p;
  p.params = params;
  p.body_x = body_x;
  p.rng.seed(params.seed);
  for (Leg leg : kAllLegs) p.legs[index(leg)].foot_x = p.hip_x(leg);
  return p;
}

double front_reach(const PlantParams& pp, const MotorFrame& frame, Leg leg) {
  const LegOffsets& off = frame.offsets[index(leg)];
  return pp.leg_length * (pp.reach_base + pp.reach_bj_gain * std::max(0.0, -frame.bj_deg) +
                          pp.reach_offset_gain * (off.tc + off.fti));
}

double swing_clearance(const PlantParams& pp, const MotorFrame& frame, Leg leg) {
  double c = pp.clearance_base +
             pp.clearance_ctr_gain * pp.leg_length * std::max(0.0, frame.offsets[index(leg)].ctr);
  if (is_front(leg)) c += pp.clearance_bj_gain * std::max(0.0, frame.bj_deg - kBjRestDeg);
  return c;
}

PlantOutput plant_step(PlantState& plant, const MotorFrame& frame, const TerrainSpec& terrain,
                       Gait gait) {
  const PlantParams& pp = plant.params;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto faces = terrain.faces(pp);
  PlantOutput out;
  int support = 0;
  bool strike_any = false;

  for (Leg leg : kAllLegs) {
    LegState& ls = plant.legs[index(leg)];
    const double hip = plant.hip_x(leg);
    const double placement = hip + pp.foot_placement * pp.leg_length;
    const bool stance = frame.legs[index(leg)].ctr < 0.0;
    // Drawn every tick so runs that differ only in the controller share noise.
    const double draw = unit(plant.rng);

    if (stance && !ls.in_stance) {
      ls.stance_ticks = 0;
      ls.foot_x = placement;
      ls.unsupported = false;
    } else if (stance) {
      ++ls.stance_ticks;
    }
    ls.in_stance = stance;
    ls.striking = false;
    double contact = 0.0;

    if (stance) {
      bool ground = true;
      if (const Segment* gap = terrain.gap_at(ls.foot_x)) {
        if (is_front(leg)) {
          const double remaining = gap->end() - std::max(gap->start, hip);
          ls.unsupported = front_reach(pp, frame, leg) < remaining;
          ground = !ls.unsupported;
        } else {
          ground = false;
        }
      }
      double onset = lag_model(gait, pp);
      const Segment* seg = terrain.segment_at(ls.foot_x);
      if (seg && seg->kind == SegmentKind::Rough) {
        const double relief =
            std::max(0.0, 1.0 - pp.search_relief * std::abs(frame.offsets[index(leg)].ctr));
        onset += pp.elastic_delay * (seg->elasticity - 1.0) * relief;
        if (draw < pp.dropout_probability * relief) ground = false;
      }
      if (ground && ls.stance_ticks >= onset) contact = 1.0;
      if (contact > 0.5) ++support;
    } else {
      const double clearance = swing_clearance(pp, frame, leg);
      for (const auto& face : faces) {
        if (face.x > placement && face.x <= placement + pp.strike_window && face.height > clearance) {
          ls.striking = true;
          break;
        }
      }
      if (ls.striking) contact = 1.0;
      strike_any = strike_any || ls.striking;
    }
    ls.contact = contact;
    out.fc[index(leg)] = contact;
  }

  bool hanging = false;
  for (Leg leg : kAllLegs)
    if (is_front(leg) && plant.legs[index(leg)].unsupported) hanging = true;
  out.stalled = hanging || strike_any;
  if (!out.stalled && support >= pp.min_support_legs) {
    plant.body_x += pp.step_advance;
    out.advanced = true;
  }
  ++plant.tick;
  return out;
}

Corruption Corruption::parse(std::string_view text) {
  const auto f = split(text, ':');
  Corruption c;
  auto tick = [&](std::size_t k) {
    const double v = number(f[k], "corruption tick");
    if (v < 0 || v != std::floor(v)) throw ConfigError("corruption: ticks must be non-negative integers");
    return static_cast<int>(v);
  };
  if (f[0] == "none" || f[0].empty()) {
    if (f.size() > 1) throw ConfigError("corruption: 'none' takes no arguments");
    return c;
  }
  if (f[0] == "noise") {
    if (f.size() != 4) throw ConfigError("corruption: noise takes noise:percent:from:to");
    c.kind = Kind::GaussianNoise;
    c.percent = number(f[1], "noise percent");
    if (c.percent < 0) throw ConfigError("corruption: percent must be >= 0");
    c.from = tick(2);
    c.to = tick(3);
  } else if (f[0] == "dropout") {
    if (f.size() != 3) throw ConfigError("corruption: dropout takes dropout:from:to");
    c.kind = Kind::Dropout;
    c.from = tick(1);
    c.to = tick(2);
  } else {
    throw ConfigError("corruption: unknown kind '" + std::string(f[0]) + "'");
  }
  if (c.to < c.from) throw ConfigError("corruption: window end before start");
  return c;
}

std::string Corruption::to_string() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::GaussianNoise:
      return "noise:" + fmt(percent) + ":" + std::to_string(from) + ":" + std::to_string(to);
    case Kind::Dropout: return "dropout:" + std::to_string(from) + ":" + std::to_string(to);
  }
  return "none";
}

std::vector<double> inject_corruption(std::span<const double> stream, const Corruption& c,
                                      std::uint64_t seed) {
  std::vector<double> out(stream.begin(), stream.end());
  if (c.kind == Corruption::Kind::None) return out;
  if (c.from < 0 || c.to < c.from || static_cast<std::size_t>(c.to) >= stream.size())
    throw InputError("inject_corruption: window outside the stream");
  if (c.kind == Corruption::Kind::Dropout) {
    for (int t = c.from; t <= c.to; ++t) out[t] = 0.0;
    return out;
  }
  if (c.percent == 0.0) return out;
  const auto [lo, hi] = std::minmax_element(stream.begin(), stream.end());
  const double sigma = c.percent / 100.0 * (*hi - *lo);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (int t = c.from; t <= c.to; ++t) out[t] += noise(rng);
  return out;
}

ProgressMetrics progress_metrics(std::span<const double> body_x, const TerrainSpec& terrain) {
  ProgressMetrics m;
  if (body_x.empty()) return m;
  const double goal = terrain.goal();
  m.distance = body_x.back() - body_x.front();
  for (std::size_t t = 0; t < body_x.size(); ++t) {
    if (body_x[t] > goal) {
      m.success = true;
      m.success_tick = static_cast<long>(t);
      m.success_seconds = static_cast<double>(t) * kSecondsPerTick;
      break;
    }
  }
  return m;
}

}  // namespace hexfm
