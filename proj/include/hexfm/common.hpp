#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hexfm {

inline constexpr int kNumLegs = 6;
inline constexpr int kNumGaits = 3;

/// Wall-clock duration of one simulation tick (controller runs at ~27 Hz).
inline constexpr double kSecondsPerTick = 0.037;

enum class Gait : int { Wave = 0, Tetrapod = 1, Caterpillar = 2 };

/// Leg order used for every per-leg array in the project.
enum class Leg : int { R1 = 0, R2 = 1, R3 = 2, L1 = 3, L2 = 4, L3 = 5 };

inline constexpr std::array<Gait, kNumGaits> kAllGaits{Gait::Wave, Gait::Tetrapod,
                                                       Gait::Caterpillar};
inline constexpr std::array<Leg, kNumLegs> kAllLegs{Leg::R1, Leg::R2, Leg::R3,
                                                    Leg::L1, Leg::L2, Leg::L3};

constexpr int index(Gait g) { return static_cast<int>(g); }
constexpr int index(Leg l) { return static_cast<int>(l); }

constexpr bool is_front(Leg l) { return l == Leg::R1 || l == Leg::L1; }

/// Distance of the leg's hip from the body centre, in units of half a body length.
constexpr int hip_row(Leg l) {
  switch (l) {
    case Leg::R1:
    case Leg::L1: return 1;
    case Leg::R2:
    case Leg::L2: return 0;
    default: return -1;
  }
}

std::string_view gait_name(Gait g);
std::string_view leg_name(Leg l);
Gait parse_gait(std::string_view name);

/// Bad parameters or configuration values. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected runtime input (non-finite samples, empty sequences, dimension mismatch).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (non-convergence, singular systems).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hexfm
