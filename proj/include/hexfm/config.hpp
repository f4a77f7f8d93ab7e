#pragma once

// Run configuration: INI-style sections, every value explicit in the echo.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hexfm/adaptation.hpp"
#include "hexfm/cpg.hpp"
#include "hexfm/plant.hpp"
#include "hexfm/reservoir.hpp"

namespace hexfm {

enum class ModelKind { Reservoir, Baseline };

std::string_view model_name(ModelKind m);
ModelKind parse_model(std::string_view name);

/// Scenario id with its fixed gait and default terrain.
///   train_flat | gap_double | rough_elastic(e) | obstacle(h) | stairs
struct Scenario {
  std::string kind = "train_flat";
  double param = 0.0;  // elasticity for rough_elastic, height for obstacle
  Gait gait = Gait::Wave;
  std::string terrain;  // default segment list
  int ticks = 2500;     // default closed-loop run length
  bool gap_mode = false;

  std::string id() const;
};

Scenario parse_scenario(std::string_view id);

struct TrainingOptions {
  int block_ticks = 2500;
  int cycles = 3;
  int warmup_ticks = 300;      // motor pipeline settling before anything is logged
  int eval_ticks = 2500;       // flat evaluation length per gait
  int transient_ticks = 50;    // excluded from NMSE
  bool pretrain = true;
  double readout_noise = 0.0;  // std of rate noise during the RLS pass
};

struct AdaptationOptions {
  bool enabled = true;
  OffsetGains gains{};
  double error_threshold = kDefaultErrorThreshold;
  BjParams bj{};
};

struct BaselineOptions {
  double smoothing = 0.9;
  int max_delay = 40;
};

struct RunConfig {
  // [run]
  std::string scenario_id = "train_flat";
  ModelKind model = ModelKind::Reservoir;
  std::uint64_t seed = 1;
  int trials = 1;
  int ticks = 0;  // 0: scenario default
  std::string out_dir = "out";
  Corruption corruption{};

  ReservoirParams<double> reservoir{};
  PretrainOptions<double> pretrain{};
  double delta_c = 1e-4;
  TrainingOptions training{};
  GaitTable gaits = GaitTable::defaults();
  std::string terrain_override;  // empty: scenario default
  PlantParams plant{};
  AdaptationOptions adaptation{};
  BaselineOptions baseline{};

  Scenario scenario() const;
  TerrainSpec terrain() const;
  int run_ticks() const;

  /// Effective configuration as INI text (round-trips through parse_config).
  std::string to_ini() const;
  void validate() const;
};

RunConfig parse_config(std::string_view ini_text);
RunConfig load_config(const std::string& path);

/// Per-trial derived seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace hexfm
