#pragma once

// Experiment driver: training protocol, closed-loop scenarios, sweeps.

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hexfm/adaptation.hpp"
#include "hexfm/config.hpp"
#include "hexfm/plant.hpp"

namespace hexfm {

/// Column-oriented per-tick log. Column names are fixed per log kind.
struct RunLog {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(std::string_view name) const;  // -1 if absent
  std::vector<double> series(std::string_view name) const;
  bool empty() const { return rows.empty(); }
};

/// Summary statistics derived only from the logged rows (so a re-parsed CSV
/// gives identical values): per-leg NMSE of rf against fc (overall and per
/// gait, first `transient` rows of each gait run excluded), final body_x,
/// success tick if a `goal` column is present.
std::map<std::string, double> summarize(const RunLog& log, int transient = 50);

/// Flat-ground recording used for both training passes.
struct FlatRecording {
  std::vector<Gait> gait;
  std::array<std::vector<double>, kNumLegs> u;   // CTr efference copy
  std::array<std::vector<double>, kNumLegs> fc;  // foot contact
  std::size_t size() const { return gait.size(); }
};

/// Motor pipeline on flat ground following `schedule` (one gait per tick),
/// after `warmup` ticks in the first gait.
FlatRecording record_flat(const RunConfig& cfg, std::span<const Gait> schedule, int warmup);

/// wave→tetrapod→caterpillar blocks, `cycles` times.
std::vector<Gait> training_schedule(const TrainingOptions& opt);

struct TrainedModel {
  ForwardModelBank bank;
  std::array<int, kNumLegs> baseline_delay{};
};

struct BlockCheck {
  Gait gait = Gait::Wave;
  int block = 0;
  Leg leg = Leg::R1;
  double relative_change = 0.0;  // active column norm over the final 500 ticks
  bool inactive_unchanged = true;
};

struct TrainingResult {
  TrainedModel model;
  RunLog log;
  std::array<PretrainReport<double>, kNumLegs> pretrain{};
  std::vector<BlockCheck> blocks;
  double seconds = 0.0;
};

/// Pre-training pass (IP + time constants) then RLS pass over the same
/// flat-ground protocol. Baseline delays are fitted on the first wave block.
TrainingResult run_training(const RunConfig& cfg);

void save_weights(const std::string& path, const TrainedModel& model, const RunConfig& cfg);
TrainedModel load_weights(const std::string& path);

struct FlatEvaluation {
  Gait gait = Gait::Wave;
  std::array<std::vector<double>, kNumLegs> u, rf, fc;
  std::array<double, kNumLegs> nmse{};
};

/// Open-loop prediction on flat ground for one gait; the corruption acts on
/// the efference copy only. Tick indices of the corruption window count from
/// the first evaluated tick.
FlatEvaluation evaluate_flat(const RunConfig& cfg, const TrainedModel& model, Gait gait,
                             const Corruption& corruption, int ticks);

double nmse(std::span<const double> prediction, std::span<const double> target, int skip);

struct ScenarioResult {
  RunLog log;
  ProgressMetrics progress;
  BjState bj;
  std::vector<double> body_x;
};

/// Closed loop: CPG → forward models → offsets/BJ → plant → errors.
ScenarioResult run_scenario(const RunConfig& cfg, const TrainedModel& model);

enum class SweepAxis { G, N, Elasticity };
SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis a);

struct SweepRow {
  double value = 0.0;
  ModelKind model = ModelKind::Reservoir;
  std::vector<double> samples;
  int successes = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// g / N: one-leg training MSE per trial seed (wave gait, flat ground).
/// Elasticity: success tick on rough_elastic(e) per trial plant seed, for
/// the models in `models` (a failed run counts as the run length).
std::vector<SweepRow> run_sweep(const RunConfig& cfg, SweepAxis axis, std::span<const double> values,
                                int trials, const TrainedModel* model = nullptr,
                                std::span<const ModelKind> models = {});

/// Training MSE of a single freshly initialised leg model (the g / N sweep unit):
/// mean squared online RLS error over one block, transient excluded.
double single_leg_mse(const RunConfig& cfg, std::uint64_t trial_seed, Gait gait = Gait::Wave);

}  // namespace hexfm
