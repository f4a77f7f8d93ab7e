// hexfm: train forward models, run closed-loop scenarios, sweep parameters, re-plot logs.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hexfm/output.hpp"

using namespace hexfm;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string scenario;
  std::string model;
  std::string out;
  int trials = 0;
  std::string weights;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--scenario", c.scenario,
                  "train_flat | gap_double | rough_elastic(e) | obstacle(h) | stairs");
  app->add_option("--model", c.model, "reservoir | baseline");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--trials", c.trials, "number of trials")->check(CLI::PositiveNumber);
}

RunConfig effective(const Common& c, CLI::App* app) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (app->count("--seed")) cfg.seed = c.seed;
  if (app->count("--scenario")) cfg.scenario_id = c.scenario;
  if (app->count("--model")) cfg.model = parse_model(c.model);
  if (app->count("--out")) cfg.out_dir = c.out;
  if (app->count("--trials")) cfg.trials = c.trials;
  cfg.validate();
  return cfg;
}

std::string weights_path(const RunConfig& cfg, const std::string& given) {
  if (!given.empty()) return given;
  return (std::filesystem::path(cfg.out_dir) / ("weights_seed" + std::to_string(cfg.seed) + ".txt")).string();
}

void print_summary(const std::map<std::string, double>& s, const std::string& prefix) {
  for (const auto& [k, v] : s) std::printf("%s%s = %.6g\n", prefix.c_str(), k.c_str(), v);
}

TrainedModel train_and_save(const RunConfig& cfg, const std::string& path) {
  RunConfig t = cfg;
  t.scenario_id = "train_flat";
  TrainingResult tr = run_training(t);
  std::filesystem::create_directories(std::filesystem::path(path).parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : std::filesystem::path(path).parent_path());
  save_weights(path, tr.model, t);
  for (const auto& p : emit_outputs(tr.log, t, "train")) std::printf("wrote %s\n", p.c_str());
  std::printf("wrote %s\n", path.c_str());
  std::printf("training: %.2f s, %zu ticks\n", tr.seconds, tr.log.rows.size());
  double worst = 0.0;
  bool isolated = true;
  for (const auto& b : tr.blocks) {
    worst = std::max(worst, b.relative_change);
    isolated = isolated && b.inactive_unchanged;
  }
  std::printf("training: worst active-norm change over final 500 ticks of a block = %.4g\n", worst);
  std::printf("training: inactive readout columns unchanged = %s\n", isolated ? "yes" : "no");
  for (Gait g : kAllGaits) {
    const FlatEvaluation ev = evaluate_flat(t, tr.model, g, Corruption{}, t.training.eval_ticks);
    std::printf("flat NMSE %-12s", std::string(gait_name(g)).c_str());
    for (double v : ev.nmse) std::printf(" %.4f", v);
    std::printf("\n");
  }
  return tr.model;
}

TrainedModel obtain_model(const RunConfig& cfg, const std::string& given) {
  const std::string path = weights_path(cfg, given);
  if (std::filesystem::exists(path)) {
    std::printf("loading %s\n", path.c_str());
    return load_weights(path);
  }
  if (!given.empty()) throw InputError("weights file '" + given + "' not found");
  std::printf("no weights at %s, training first\n", path.c_str());
  return train_and_save(cfg, path);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("bad sweep value '" + item + "'");
  }
  if (out.empty()) throw ConfigError("no sweep values");
  return out;
}

RunConfig config_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string ini, line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') ini += line.substr(line.size() > 1 ? 2 : 1) + "\n";
  return parse_config(ini);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reservoir forward models for hexapod locomotion"};
  app.require_subcommand(1);

  Common train_opts, run_opts, sweep_opts, plot_opts;
  auto* train = app.add_subcommand("train", "train the six forward models on flat ground");
  add_common(train, train_opts);
  train->add_option("--weights", train_opts.weights, "weight file to write");

  auto* run = app.add_subcommand("run", "closed-loop scenario run");
  add_common(run, run_opts);
  run->add_option("--weights", run_opts.weights, "trained weight file (trains if absent)");

  std::string axis = "g", values, models;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over seeds");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "g | N | elasticity");
  sweep->add_option("--values", values, "comma separated values");
  sweep->add_option("--models", models, "comma separated models for the elasticity axis");
  sweep->add_option("--weights", sweep_opts.weights, "trained weight file (elasticity axis)");

  std::string input;
  auto* plot = app.add_subcommand("plot", "re-render SVGs from a log CSV");
  plot->add_option("input", input, "log CSV written by train or run")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_opts.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train->parsed()) {
      RunConfig cfg = effective(train_opts, train);
      if (cfg.scenario().kind != "train_flat") throw ConfigError("train requires scenario train_flat");
      train_and_save(cfg, weights_path(cfg, train_opts.weights));
    } else if (run->parsed()) {
      const RunConfig cfg = effective(run_opts, run);
      const TrainedModel model = obtain_model(cfg, run_opts.weights);
      int successes = 0;
      for (int k = 0; k < cfg.trials; ++k) {
        RunConfig c = cfg;
        if (cfg.trials > 1) c.seed = derive_seed(cfg.seed, 100 + static_cast<std::uint64_t>(k));
        const ScenarioResult r = run_scenario(c, model);
        for (const auto& p : emit_outputs(r.log, c, "run")) std::printf("wrote %s\n", p.c_str());
        std::printf("trial %d seed %llu: success=%s tick=%ld body_x=%.2f bj_episodes=%d\n", k,
                    static_cast<unsigned long long>(c.seed), r.progress.success ? "yes" : "no",
                    static_cast<long>(r.progress.success_tick), r.progress.distance, r.bj.episodes);
        successes += r.progress.success;
      }
      std::printf("%d/%d trials succeeded\n", successes, cfg.trials);
    } else if (sweep->parsed()) {
      const RunConfig cfg = effective(sweep_opts, sweep);
      const SweepAxis ax = parse_axis(axis);
      std::vector<double> vals;
      if (!values.empty()) vals = parse_values(values);
      else if (ax == SweepAxis::G) vals = {0.1, 0.5, 0.95, 1.2};
      else if (ax == SweepAxis::N) vals = {10, 30, 100};
      else vals = {1.0, 5.0, 10.0};
      std::vector<ModelKind> kinds;
      if (!models.empty()) {
        std::stringstream ss(models);
        for (std::string m; std::getline(ss, m, ',');) kinds.push_back(parse_model(m));
      }
      TrainedModel model;
      const TrainedModel* mp = nullptr;
      if (ax == SweepAxis::Elasticity) {
        model = obtain_model(cfg, sweep_opts.weights);
        mp = &model;
      }
      const auto rows = run_sweep(cfg, ax, vals, cfg.trials, mp, kinds);
      const std::string path = output_stem(cfg.out_dir, "sweep_" + std::string(axis_name(ax)), cfg) + ".csv";
      write_sweep_csv(path, ax, rows, cfg.to_ini());
      for (const auto& r : rows)
        std::printf("%s=%g model=%s mean=%.6g std=%.6g successes=%d/%zu\n", std::string(axis_name(ax)).c_str(),
                    r.value, std::string(model_name(r.model)).c_str(), r.mean, r.stddev, r.successes,
                    r.samples.size());
      std::printf("wrote %s\n", path.c_str());
    } else if (plot->parsed()) {
      RunConfig cfg = config_from_csv(input);
      cfg.out_dir = plot_opts.out.empty() ? std::filesystem::path(input).parent_path().string() : plot_opts.out;
      const RunLog log = read_csv(input);
      std::string kind = std::filesystem::path(input).stem().string();
      kind = kind.substr(0, kind.find('_')) + "_replot";
      for (const auto& p : emit_outputs(log, cfg, kind)) std::printf("wrote %s\n", p.c_str());
      print_summary(summarize(log, cfg.training.transient_ticks), "");
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "hexfm: config error: %s\n", e.what());
    return 2;
  } catch (const InputError& e) {
    std::fprintf(stderr, "hexfm: input error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hexfm: error: %s\n", e.what());
    return 4;
  }
  return 0;
}
