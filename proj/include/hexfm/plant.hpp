#pragma once

// 1-D kinematic walking plant: turns motor frames and a terrain strip into
// foot-contact signals and forward body progress.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hexfm/common.hpp"
#include "hexfm/cpg.hpp"

namespace hexfm {

struct PlantParams;

enum class SegmentKind { Flat, Gap, Rough, Obstacle, Stairs };

struct Segment {
  SegmentKind kind = SegmentKind::Flat;
  double start = 0.0;   // cm, filled in by TerrainSpec::layout
  double length = 0.0;  // cm
  double height = 0.0;  // obstacle / bump / step height, cm
  double elasticity = 1.0;
  int count = 0;        // stairs: number of steps

  double end() const { return start + length; }
};

/// Ordered, contiguous terrain segments starting at `start`.
///
/// Text form (comma separated):
///   flat:L  gap:L  rough:L[:height[:elasticity]]  obstacle:H[:width]  stairs:H:count
struct TerrainSpec {
  double start = 0.0;
  std::vector<Segment> segments;

  static TerrainSpec parse(std::string_view text, double start = 0.0);
  std::string to_string() const;

  /// Recomputes segment starts from lengths (contiguous from `start`).
  void layout();
  void validate() const;

  const Segment* segment_at(double x) const;
  /// Gap segment containing x (open at both ends), or nullptr.
  const Segment* gap_at(double x) const;
  /// End of the last non-flat segment; end of the strip if all flat.
  double goal() const;
  double end() const;

  /// Rising faces (position, height) of obstacles, steps and rough bumps.
  struct Face {
    double x;
    double height;
  };
  std::vector<Face> faces(const PlantParams& params) const;
};

/// Gaps up to 15 cm can be crossed.
inline constexpr double kMaxCrossableGap = 15.0;
inline bool gap_crossable(const Segment& s) {
  return s.kind != SegmentKind::Gap || s.length <= kMaxCrossableGap;
}

struct PlantParams {
  double body_length = 34.0;   // cm
  double leg_length = 17.5;    // cm
  double step_advance = 0.5;   // cm per propelling tick
  int min_support_legs = 3;

  // Foot lands this far (× leg length) ahead of the hip at touchdown.
  double foot_placement = 0.1;
  // Front-leg reach = leg_length · (base + bj_gain·max(0, −bj) + offset_gain·(tc_off + fti_off)).
  double reach_base = 0.48;
  double reach_bj_gain = 0.02;
  double reach_offset_gain = 0.3;

  // Swing clearance = base + ctr_gain·leg_length·ctr_off (+ bj_gain·(bj − rest) for front legs).
  double clearance_base = 6.0;
  double clearance_ctr_gain = 0.6;
  double clearance_bj_gain = 0.35;  // cm per degree
  double strike_window = 4.0;       // cm ahead of the foot

  // Rough ground.
  double dropout_probability = 0.3;
  double search_relief = 1.4;       // dropout and delay scale with (1 − relief·|ctr_off|)
  double elastic_delay = 2.0;       // extra onset ticks per elasticity unit above 1
  double bump_width = 4.0;
  double bump_spacing = 12.0;

  std::array<int, kNumGaits> lag{8, 5, 3};
  std::uint64_t seed = 1;

  void validate() const;
};

/// Foot-contact onset lag after stance onset: wave 8, tetrapod 5, caterpillar 3 ticks.
int lag_model(Gait gait, const PlantParams& params = {});

struct LegState {
  double foot_x = 0.0;
  bool in_stance = false;
  int stance_ticks = 0;      // ticks since stance onset
  double contact = 0.0;
  bool unsupported = false;  // front foot hanging over a gap
  bool striking = false;
};

struct PlantState {
  PlantParams params;
  double body_x = 0.0;
  std::array<LegState, kNumLegs> legs{};
  std::mt19937_64 rng;
  long tick = 0;

  double hip_x(Leg leg) const { return body_x + 0.5 * params.body_length * hip_row(leg); }
};

PlantState init_plant(const PlantParams& params, double body_x = 0.0);

struct PlantOutput {
  std::array<double, kNumLegs> fc{};
  bool advanced = false;
  bool stalled = false;
};

/// One tick. Stance is taken from the CTr program (ctr < 0); offsets and the
/// BJ angle in the frame change reach, clearance and rough-ground contact.
PlantOutput plant_step(PlantState& plant, const MotorFrame& frame, const TerrainSpec& terrain,
                       Gait gait);

/// Front-leg reach (cm) for the given frame.
double front_reach(const PlantParams& params, const MotorFrame& frame, Leg leg);
/// Swing clearance (cm) for the given frame.
double swing_clearance(const PlantParams& params, const MotorFrame& frame, Leg leg);

struct Corruption {
  enum class Kind { None, GaussianNoise, Dropout };
  Kind kind = Kind::None;
  double percent = 0.0;  // noise std as % of the signal range
  int from = 0;          // inclusive tick window
  int to = -1;

  static Corruption parse(std::string_view text);
  std::string to_string() const;
};

/// Applies the corruption inside [from, to]; samples outside are untouched.
std::vector<double> inject_corruption(std::span<const double> stream, const Corruption& c,
                                      std::uint64_t seed);

struct ProgressMetrics {
  bool success = false;
  long success_tick = -1;
  double success_seconds = -1.0;
  double distance = 0.0;
};

ProgressMetrics progress_metrics(std::span<const double> body_x, const TerrainSpec& terrain);

}  // namespace hexfm
