#include "hexfm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hexfm {

namespace {

constexpr std::uint64_t kStreamReservoir = 1;
constexpr std::uint64_t kStreamPretrain = 2;
constexpr std::uint64_t kStreamCorruption = 3;
constexpr std::uint64_t kStreamPlant = 4;
constexpr std::uint64_t kStreamNoise = 5;
constexpr std::uint64_t kStreamTrial = 100;

const TerrainSpec& endless_flat() {
  static const TerrainSpec t = TerrainSpec::parse("flat:10000000");
  return t;
}

std::string leg_col(std::string_view base, Leg leg) {
  return std::string(base) + "_" + std::string(leg_name(leg));
}

}  // namespace

int RunLog::column(std::string_view name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return static_cast<int>(k);
  return -1;
}

std::vector<double> RunLog::series(std::string_view name) const {
  const int c = column(name);
  if (c < 0) throw InputError("log has no column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

double nmse(std::span<const double> p, std::span<const double> d, int skip) {
  if (p.size() != d.size()) throw InputError("nmse: length mismatch");
  if (skip < 0 || static_cast<std::size_t>(skip) >= p.size()) throw InputError("nmse: nothing left after skip");
  const std::size_t n = p.size() - skip;
  double mean = 0.0;
  for (std::size_t t = skip; t < d.size(); ++t) mean += d[t];
  mean /= static_cast<double>(n);
  double var = 0.0, err = 0.0;
  for (std::size_t t = skip; t < d.size(); ++t) {
    var += (d[t] - mean) * (d[t] - mean);
    err += (p[t] - d[t]) * (p[t] - d[t]);
  }
  if (var == 0.0) throw NumericError("nmse: target has zero variance");
  return err / var;
}

std::map<std::string, double> summarize(const RunLog& log, int transient) {
  std::map<std::string, double> s;
  s["rows"] = static_cast<double>(log.rows.size());
  if (log.rows.empty()) return s;
  const int gait_col = log.column("gait");
  for (Leg leg : kAllLegs) {
    const int rc = log.column(leg_col("rf", leg));
    const int fc = log.column(leg_col("fc", leg));
    if (rc < 0 || fc < 0) continue;
    // Group rows into contiguous gait runs; drop the first `transient` rows of each.
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_gait;
    std::vector<double> all_p, all_d;
    int run_gait = -1, run_len = 0;
    for (const auto& row : log.rows) {
      const int g = gait_col >= 0 ? static_cast<int>(row[gait_col]) : 0;
      run_len = g == run_gait ? run_len + 1 : 0;
      run_gait = g;
      if (run_len < transient) continue;
      by_gait[g].first.push_back(row[rc]);
      by_gait[g].second.push_back(row[fc]);
      all_p.push_back(row[rc]);
      all_d.push_back(row[fc]);
    }
    auto safe_nmse = [](const std::vector<double>& p, const std::vector<double>& d) {
      try {
        return nmse(p, d, 0);
      } catch (const std::exception&) {
        return std::nan("");
      }
    };
    if (!all_p.empty()) s["nmse." + std::string(leg_name(leg))] = safe_nmse(all_p, all_d);
    for (const auto& [g, pd] : by_gait)
      s["nmse." + std::string(gait_name(static_cast<Gait>(g))) + "." + std::string(leg_name(leg))] =
          safe_nmse(pd.first, pd.second);
  }
  if (const int bx = log.column("body_x"); bx >= 0) s["final_body_x"] = log.rows.back()[bx];
  if (const int sc = log.column("success"); sc >= 0) {
    s["success_tick"] = -1;
    for (std::size_t t = 0; t < log.rows.size(); ++t)
      if (log.rows[t][sc] > 0.5) {
        s["success_tick"] = log.rows[t][log.column("tick")];
        break;
      }
  }
  if (const int bj = log.column("bj"); bj >= 0) {
    double mx = -1e300;
    for (const auto& r : log.rows) mx = std::max(mx, r[bj]);
    s["max_bj"] = mx;
  }
  return s;
}

std::vector<Gait> training_schedule(const TrainingOptions& opt) {
  if (opt.cycles < 1) throw ConfigError("training.cycles must be >= 1 (no training data)");
  std::vector<Gait> out;
  for (int c = 0; c < opt.cycles; ++c)
    for (Gait g : kAllGaits) out.insert(out.end(), static_cast<std::size_t>(opt.block_ticks), g);
  return out;
}

FlatRecording record_flat(const RunConfig& cfg, std::span<const Gait> schedule, int warmup) {
  if (schedule.empty()) throw InputError("record_flat: empty schedule");
  MotorPipeline motor(cfg.gaits);
  PlantParams pp = cfg.plant;
  pp.seed = derive_seed(cfg.seed, kStreamPlant);
  PlantState plant = init_plant(pp);
  const TerrainSpec& flat = endless_flat();
  for (int t = 0; t < warmup; ++t) plant_step(plant, motor.step(schedule[0]), flat, schedule[0]);

  FlatRecording rec;
  rec.gait.assign(schedule.begin(), schedule.end());
  for (auto& v : rec.u) v.reserve(schedule.size());
  for (auto& v : rec.fc) v.reserve(schedule.size());
  for (Gait g : schedule) {
    const MotorFrame frame = motor.step(g);
    const PlantOutput out = plant_step(plant, frame, flat, g);
    for (Leg leg : kAllLegs) {
      rec.u[index(leg)].push_back(frame.legs[index(leg)].ctr);
      rec.fc[index(leg)].push_back(out.fc[index(leg)]);
    }
  }
  return rec;
}

TrainingResult run_training(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto schedule = training_schedule(cfg.training);
  const FlatRecording rec = record_flat(cfg, schedule, cfg.training.warmup_ticks);

  ReservoirParams<double> rp = cfg.reservoir;
  rp.seed = derive_seed(cfg.seed, kStreamReservoir);
  TrainingResult result;
  ForwardModelBank& bank = result.model.bank;
  bank = make_bank(rp, cfg.delta_c);

  std::vector<int> labels(rec.size());
  for (std::size_t t = 0; t < rec.size(); ++t) labels[t] = index(rec.gait[t]);
  if (cfg.training.pretrain) {
    for (Leg leg : kAllLegs) {
      PretrainOptions<double> opt = cfg.pretrain;
      opt.seed = derive_seed(cfg.seed, kStreamPretrain + 10 * static_cast<std::uint64_t>(index(leg)));
      result.pretrain[index(leg)] = pretrain_adapt<double>(bank.reservoir(leg), rec.u[index(leg)],
                                                           rec.fc[index(leg)], labels, opt);
    }
  }

  // RLS pass over the same protocol.
  bank.reset_dynamics();
  bank.set_learning(true);
  bank.training_noise = cfg.training.readout_noise;
  bank.noise_rng.seed(derive_seed(cfg.seed, kStreamNoise));
  RunLog& log = result.log;
  log.columns = {"tick", "gait"};
  for (Leg leg : kAllLegs)
    for (const char* c : {"u", "fc", "rf", "w_wave", "w_tetrapod", "w_caterpillar"})
      log.columns.push_back(leg_col(c, leg));
  log.rows.reserve(rec.size());

  const int block = cfg.training.block_ticks;
  const int tail = std::min(500, block);
  std::array<Matrix<double>, kNumLegs> block_start;
  std::array<double, kNumLegs> tail_norm{};
  for (std::size_t t = 0; t < rec.size(); ++t) {
    const Gait g = rec.gait[t];
    const int in_block = static_cast<int>(t % static_cast<std::size_t>(block));
    if (in_block == 0)
      for (Leg leg : kAllLegs) block_start[index(leg)] = bank.readout(leg).w_out;

    std::vector<double> row{static_cast<double>(t), static_cast<double>(index(g))};
    for (Leg leg : kAllLegs) {
      const int i = index(leg);
      const double rf = fm_train_step(bank, leg, rec.u[i][t], rec.fc[i][t], g);
      const auto& w = bank.readout(leg).w_out;
      row.insert(row.end(), {rec.u[i][t], rec.fc[i][t], rf, w.col(0).norm(), w.col(1).norm(), w.col(2).norm()});
    }
    log.rows.push_back(std::move(row));

    if (in_block == block - tail - 1 || (tail == block && in_block == 0)) {
      for (Leg leg : kAllLegs) tail_norm[index(leg)] = bank.readout(leg).w_out.col(index(g)).norm();
    }
    if (in_block == block - 1) {
      for (Leg leg : kAllLegs) {
        const auto& w = bank.readout(leg).w_out;
        BlockCheck bc;
        bc.gait = g;
        bc.block = static_cast<int>(t / static_cast<std::size_t>(block));
        bc.leg = leg;
        const double now = w.col(index(g)).norm();
        bc.relative_change = now > 0 ? std::abs(now - tail_norm[index(leg)]) / now : 1.0;
        for (Gait other : kAllGaits)
          if (other != g && w.col(index(other)) != block_start[index(leg)].col(index(other)))
            bc.inactive_unchanged = false;
        result.blocks.push_back(bc);
      }
    }
  }
  bank.set_learning(false);
  bank.reset_dynamics();
  bank.training_noise = 0.0;

  // Baseline: one fixed delay per leg, from the first wave block.
  const std::size_t first_block = static_cast<std::size_t>(block);
  for (Leg leg : kAllLegs) {
    const int i = index(leg);
    result.model.baseline_delay[i] = fit_baseline_delay(
        std::span<const double>(rec.u[i]).first(first_block),
        std::span<const double>(rec.fc[i]).first(first_block), cfg.baseline.max_delay);
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

void write_matrix(std::ostream& o, const char* name, const Matrix<double>& m) {
  o << "matrix " << name << " " << m.rows() << " " << m.cols() << "\n";
  char buf[40];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      o << (c ? " " : "") << buf;
    }
    o << "\n";
  }
}

Matrix<double> read_matrix(std::istream& in, const std::string& expect) {
  std::string tag, name;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> tag >> name >> rows >> cols) || tag != "matrix" || name != expect || rows < 0 || cols < 0)
    throw InputError("weights: expected matrix '" + expect + "'");
  Matrix<double> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> m(r, c))) throw InputError("weights: truncated matrix '" + expect + "'");
  return m;
}

}  // namespace

void save_weights(const std::string& path, const TrainedModel& model, const RunConfig& cfg) {
  std::ofstream o(path);
  if (!o) throw InputError("cannot write weights to '" + path + "'");
  std::istringstream ini(cfg.to_ini());
  for (std::string line; std::getline(ini, line);) o << "# " << line << "\n";
  const auto& bank = model.bank;
  const int n = bank.reservoirs[0].size();
  o << "hexfm-weights 1\n";
  o << "legs " << kNumLegs << "\nneurons " << n << "\n";
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const auto& r0 = bank.reservoirs[0];
  o << "recurrent_scale " << num(r0.recurrent_scale) << "\ndt " << num(r0.dt) << "\ntau_range "
    << num(r0.tau_min) << " " << num(r0.tau_max) << "\ndelta_c " << num(bank.readouts[0].delta_c) << "\n";
  o << "baseline_delay";
  for (int d : model.baseline_delay) o << " " << d;
  o << "\n";
  for (Leg leg : kAllLegs) {
    const auto& r = bank.reservoirs[index(leg)];
    o << "leg " << leg_name(leg) << "\n";
    write_matrix(o, "w_in", r.w_in);
    write_matrix(o, "w_rec", Matrix<double>(r.w_rec));
    write_matrix(o, "bias", r.bias);
    write_matrix(o, "gain", r.gain);
    write_matrix(o, "shift", r.shift);
    write_matrix(o, "tau", r.tau);
    write_matrix(o, "w_out", bank.readouts[index(leg)].w_out);
  }
  if (!o) throw InputError("failed writing weights to '" + path + "'");
}

TrainedModel load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open weights file '" + path + "'");
  std::string line;
  std::streampos body = in.tellg();
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') break;
    body = in.tellg();
  }
  in.seekg(body);
  std::string tag;
  int version = 0, legs = 0, n = 0;
  if (!(in >> tag >> version) || tag != "hexfm-weights") throw InputError("weights: bad header in '" + path + "'");
  if (version != 1) throw InputError("weights: unsupported version " + std::to_string(version));
  double g = 0, dt = 0, tmin = 0, tmax = 0, delta_c = 0;
  if (!(in >> tag >> legs) || tag != "legs" || legs != kNumLegs) throw InputError("weights: bad leg count");
  if (!(in >> tag >> n) || tag != "neurons" || n < 1) throw InputError("weights: bad neuron count");
  if (!(in >> tag >> g) || tag != "recurrent_scale") throw InputError("weights: missing recurrent_scale");
  if (!(in >> tag >> dt) || tag != "dt") throw InputError("weights: missing dt");
  if (!(in >> tag >> tmin >> tmax) || tag != "tau_range") throw InputError("weights: missing tau_range");
  if (!(in >> tag >> delta_c) || tag != "delta_c") throw InputError("weights: missing delta_c");
  TrainedModel model;
  if (!(in >> tag) || tag != "baseline_delay") throw InputError("weights: missing baseline_delay");
  for (int& d : model.baseline_delay)
    if (!(in >> d)) throw InputError("weights: truncated baseline_delay");

  for (Leg leg : kAllLegs) {
    std::string name;
    if (!(in >> tag >> name) || tag != "leg" || name != leg_name(leg))
      throw InputError("weights: expected leg " + std::string(leg_name(leg)));
    ReservoirState<double> r;
    r.recurrent_scale = g;
    r.dt = dt;
    r.tau_min = tmin;
    r.tau_max = tmax;
    r.w_in = read_matrix(in, "w_in");
    const Matrix<double> w_rec = read_matrix(in, "w_rec");
    r.w_rec = w_rec.sparseView();
    r.w_rec.makeCompressed();
    r.bias = read_matrix(in, "bias");
    r.gain = read_matrix(in, "gain");
    r.shift = read_matrix(in, "shift");
    r.tau = read_matrix(in, "tau");
    if (r.w_in.size() != n || w_rec.rows() != n || w_rec.cols() != n || r.bias.size() != n ||
        r.gain.size() != n || r.shift.size() != n || r.tau.size() != n)
      throw InputError("weights: dimension mismatch for leg " + name);
    r.potential = Vector<double>::Zero(n);
    r.rate = Vector<double>::Zero(n);
    model.bank.reservoirs[index(leg)] = std::move(r);
    auto rls = rls_init(n, delta_c);
    rls.w_out = read_matrix(in, "w_out");
    if (rls.w_out.rows() != n || rls.w_out.cols() != kNumGaits)
      throw InputError("weights: w_out dimension mismatch for leg " + name);
    rls.learning_enabled = false;
    model.bank.readouts[index(leg)] = std::move(rls);
  }
  return model;
}

FlatEvaluation evaluate_flat(const RunConfig& cfg, const TrainedModel& model, Gait gait,
                             const Corruption& corruption, int ticks) {
  if (ticks <= cfg.training.transient_ticks) throw ConfigError("evaluation shorter than the transient");
  const std::vector<Gait> schedule(static_cast<std::size_t>(ticks), gait);
  const FlatRecording rec = record_flat(cfg, schedule, cfg.training.warmup_ticks);
  FlatEvaluation ev;
  ev.gait = gait;
  ForwardModelBank bank = model.bank;
  bank.reset_dynamics();
  bank.set_learning(false);
  for (Leg leg : kAllLegs) {
    const int i = index(leg);
    ev.fc[i] = rec.fc[i];
    ev.u[i] = inject_corruption(rec.u[i], corruption,
                                derive_seed(cfg.seed, kStreamCorruption + 10 * static_cast<std::uint64_t>(i)));
    ev.rf[i].reserve(ev.u[i].size());
    if (cfg.model == ModelKind::Reservoir) {
      for (double u : ev.u[i]) ev.rf[i].push_back(fm_predict_step(bank, leg, u, gait));
    } else {
      BaselineModel b = make_baseline(model.baseline_delay[i], cfg.baseline.smoothing);
      for (double u : ev.u[i]) ev.rf[i].push_back(baseline_predict_step(b, u));
    }
    ev.nmse[i] = nmse(ev.rf[i], ev.fc[i], cfg.training.transient_ticks);
  }
  return ev;
}

ScenarioResult run_scenario(const RunConfig& cfg, const TrainedModel& model) {
  cfg.validate();
  const Scenario sc = cfg.scenario();
  const TerrainSpec terrain = cfg.terrain();
  const Gait gait = sc.gait;
  const int ticks = cfg.run_ticks();
  const double goal = terrain.goal();

  MotorPipeline motor(cfg.gaits);
  PlantParams pp = cfg.plant;
  pp.seed = derive_seed(cfg.seed, kStreamPlant);
  PlantState plant = init_plant(pp, terrain.start);

  ForwardModelBank bank = model.bank;
  bank.reset_dynamics();
  bank.set_learning(false);
  std::array<BaselineModel, kNumLegs> baselines;
  for (Leg leg : kAllLegs)
    baselines[index(leg)] = make_baseline(model.baseline_delay[index(leg)], cfg.baseline.smoothing);
  auto predict = [&](Leg leg, double u) {
    return cfg.model == ModelKind::Reservoir ? fm_predict_step(bank, leg, u, gait)
                                             : baseline_predict_step(baselines[index(leg)], u);
  };

  // Settle the oscillator, the forward models and the plant's leg phases
  // with the body held in place.
  for (int t = 0; t < cfg.training.warmup_ticks; ++t) {
    const MotorFrame frame = motor.step(gait);
    for (Leg leg : kAllLegs) predict(leg, frame.legs[index(leg)].ctr);
    const double x = plant.body_x;
    plant_step(plant, frame, terrain, gait);
    plant.body_x = x;
  }

  OffsetGains gains = cfg.adaptation.gains;
  gains.gap_mode = sc.gap_mode;
  std::array<AccumulatorPair, kNumLegs> acc;
  std::array<LegOffsets, kNumLegs> offsets{};
  for (Leg leg : kAllLegs)
    acc[index(leg)].phase = plant.legs[index(leg)].in_stance ? Phase::Stance : Phase::Swing;
  ScenarioResult result;
  BjState& bj = result.bj;

  std::mt19937_64 noise_rng(derive_seed(cfg.seed, kStreamCorruption));
  const double noise_sigma = cfg.corruption.percent / 100.0 * 2.0;  // CTr spans [-1, 1]
  std::normal_distribution<double> noise(0.0, noise_sigma > 0 ? noise_sigma : 1.0);

  RunLog& log = result.log;
  log.columns = {"tick", "gait", "body_x", "bj", "bj_mode", "success"};
  for (Leg leg : kAllLegs)
    for (const char* c : {"u", "rf", "fc", "delta", "S", "E", "ctr_off", "tc_off", "fti_off"})
      log.columns.push_back(leg_col(c, leg));
  log.rows.reserve(static_cast<std::size_t>(ticks));
  result.body_x.reserve(static_cast<std::size_t>(ticks));

  for (int t = 0; t < ticks; ++t) {
    MotorFrame frame = motor.step(gait);
    std::array<double, kNumLegs> u{}, rf{};
    const bool in_window = t >= cfg.corruption.from && t <= cfg.corruption.to;
    for (Leg leg : kAllLegs) {
      const int i = index(leg);
      u[i] = frame.legs[i].ctr;
      if (in_window && cfg.corruption.kind == Corruption::Kind::Dropout) u[i] = 0.0;
      if (in_window && cfg.corruption.kind == Corruption::Kind::GaussianNoise && noise_sigma > 0)
        u[i] += noise(noise_rng);
      rf[i] = std::clamp(predict(leg, u[i]), 0.0, 1.0);
    }
    if (cfg.adaptation.enabled) {
      frame.offsets = offsets;
      frame.bj_deg = bj.angle;
    }
    const PlantOutput out = plant_step(plant, frame, terrain, gait);

    std::vector<double> row{static_cast<double>(t), static_cast<double>(index(gait)), plant.body_x,
                            frame.bj_deg, static_cast<double>(static_cast<int>(bj.mode)),
                            plant.body_x > goal ? 1.0 : 0.0};
    bool front_completed = false;
    double front_error = 0.0;
    for (Leg leg : kAllLegs) {
      const int i = index(leg);
      const double delta = instantaneous_error(rf[i], out.fc[i]);
      const Phase phase = frame.legs[i].ctr < 0.0 ? Phase::Stance : Phase::Swing;
      accumulate_step(acc[i], delta, phase, cfg.adaptation.error_threshold);
      offsets[i] = cfg.adaptation.enabled ? leg_offsets(acc[i], phase, gains) : LegOffsets{};
      if (is_front(leg)) {
        front_completed = front_completed || acc[i].stance_completed;
        front_error = std::max({front_error, acc[i].max_stance_error, acc[i].max_swing_error});
      }
      const LegOffsets& applied = frame.offsets[i];
      row.insert(row.end(), {u[i], rf[i], out.fc[i], delta, acc[i].S, acc[i].E, applied.ctr,
                             applied.tc, applied.fti});
    }
    if (cfg.adaptation.enabled) bj_update(bj, front_error, front_completed, cfg.adaptation.bj);
    log.rows.push_back(std::move(row));
    result.body_x.push_back(plant.body_x);
  }
  result.progress = progress_metrics(result.body_x, terrain);
  return result;
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "g") return SweepAxis::G;
  if (name == "N" || name == "n") return SweepAxis::N;
  if (name == "elasticity") return SweepAxis::Elasticity;
  throw ConfigError("sweep axis must be g, N or elasticity, got '" + std::string(name) + "'");
}

std::string_view axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::G: return "g";
    case SweepAxis::N: return "N";
    case SweepAxis::Elasticity: return "elasticity";
  }
  return "?";
}

double single_leg_mse(const RunConfig& cfg, std::uint64_t trial_seed, Gait gait) {
  const int train = cfg.training.block_ticks;
  const int skip = cfg.training.transient_ticks;
  const std::vector<Gait> schedule(static_cast<std::size_t>(train), gait);
  const FlatRecording rec = record_flat(cfg, schedule, cfg.training.warmup_ticks);
  const auto& u = rec.u[0];
  const auto& d = rec.fc[0];

  ReservoirParams<double> rp = cfg.reservoir;
  rp.seed = derive_seed(trial_seed, kStreamReservoir);
  auto res = init_reservoir(rp);
  if (cfg.training.pretrain) {
    PretrainOptions<double> opt = cfg.pretrain;
    opt.seed = derive_seed(trial_seed, kStreamPretrain);
    pretrain_adapt<double>(res, u, d, {}, opt);
  }
  auto rls = rls_init(rp.neurons, cfg.delta_c);
  res.reset();
  // Online error of the RLS pass: prediction made before each update.
  double sq = 0.0;
  for (int t = 0; t < train; ++t) {
    reservoir_step(res, u[t]);
    const auto upd = rls_step(rls, res.rate, d[t], gait);
    if (t >= skip) sq += upd.error * upd.error;
  }
  return sq / (train - skip);
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, SweepAxis axis, std::span<const double> values,
                                int trials, const TrainedModel* model, std::span<const ModelKind> models) {
  if (trials < 1) throw ConfigError("sweep: trials must be >= 1");
  if (values.empty()) throw ConfigError("sweep: no values");
  std::vector<SweepRow> rows;
  auto finish = [](SweepRow& r) {
    const double n = static_cast<double>(r.samples.size());
    r.mean = std::accumulate(r.samples.begin(), r.samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : r.samples) ss += (v - r.mean) * (v - r.mean);
    r.stddev = r.samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  };

  if (axis == SweepAxis::G || axis == SweepAxis::N) {
    for (double v : values) {
      RunConfig c = cfg;
      if (axis == SweepAxis::G) {
        c.reservoir.recurrent_scale = v;
      } else {
        if (v < 1 || v != std::floor(v)) throw ConfigError("sweep: N values must be positive integers");
        c.reservoir.neurons = static_cast<int>(v);
      }
      c.reservoir.validate();
      SweepRow row;
      row.value = v;
      for (int k = 0; k < trials; ++k) {
        row.samples.push_back(single_leg_mse(c, derive_seed(cfg.seed, kStreamTrial + k)));
        ++row.successes;
      }
      finish(row);
      rows.push_back(std::move(row));
    }
    return rows;
  }

  if (!model) throw ConfigError("sweep: elasticity axis needs a trained model");
  const std::array<ModelKind, 1> default_models{cfg.model};
  const std::span<const ModelKind> kinds = models.empty() ? std::span<const ModelKind>(default_models) : models;
  for (double e : values) {
    for (ModelKind kind : kinds) {
      RunConfig c = cfg;
      char id[64];
      std::snprintf(id, sizeof id, "rough_elastic(%g)", e);
      c.scenario_id = id;
      c.terrain_override.clear();
      c.model = kind;
      SweepRow row;
      row.value = e;
      row.model = kind;
      for (int k = 0; k < trials; ++k) {
        c.seed = derive_seed(cfg.seed, kStreamTrial + k);
        const ScenarioResult r = run_scenario(c, *model);
        if (r.progress.success) ++row.successes;
        row.samples.push_back(r.progress.success ? static_cast<double>(r.progress.success_tick)
                                                 : static_cast<double>(c.run_ticks()));
      }
      finish(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace hexfm
