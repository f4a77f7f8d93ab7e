#include "hexfm/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hexfm {

namespace pt = boost::property_tree;

std::string_view model_name(ModelKind m) {
  return m == ModelKind::Reservoir ? "reservoir" : "baseline";
}

ModelKind parse_model(std::string_view name) {
  if (name == "reservoir") return ModelKind::Reservoir;
  if (name == "baseline") return ModelKind::Baseline;
  throw ConfigError("run.model must be reservoir or baseline, got '" + std::string(name) + "'");
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(key + ": not a number '" + text + "'");
  return v;
}

long to_long(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v)) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return static_cast<long>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(to_double(key, item));
  }
  return out;
}

// Flattened section.key -> value with unknown-key detection.
class Keys {
 public:
  explicit Keys(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty())
        throw ConfigError("config: key '" + section + "' outside any section");
      for (const auto& [key, value] : body) values_[section + "." + key] = value.data();
    }
  }

  bool has(const std::string& k) const { return values_.count(k) > 0; }
  const std::string& raw(const std::string& k) {
    used_.insert(k);
    return values_.at(k);
  }

  template <typename T, typename F>
  void read(const std::string& k, T& target, F convert) {
    if (has(k)) target = static_cast<T>(convert(k, raw(k)));
  }
  void real(const std::string& k, double& t) { read(k, t, to_double); }
  void integer(const std::string& k, int& t) { read(k, t, to_long); }
  void flag(const std::string& k, bool& t) { read(k, t, to_bool); }
  void text(const std::string& k, std::string& t) {
    if (has(k)) t = raw(k);
  }

  void reject_unknown() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace

std::string Scenario::id() const {
  if (kind == "rough_elastic" || kind == "obstacle") return kind + "(" + short_num(param) + ")";
  return kind;
}

Scenario parse_scenario(std::string_view text) {
  std::string id(text);
  std::string kind = id;
  double param = 0.0;
  bool has_param = false;
  const auto open = id.find_first_of("(:");
  if (open != std::string::npos) {
    kind = id.substr(0, open);
    std::string arg = id.substr(open + 1);
    if (id[open] == '(') {
      if (arg.empty() || arg.back() != ')') throw ConfigError("run.scenario: missing ')' in '" + id + "'");
      arg.pop_back();
    }
    param = to_double("run.scenario", arg);
    has_param = true;
  }
  Scenario s;
  s.kind = kind;
  if (kind == "train_flat") {
    s.gait = Gait::Wave;
    s.terrain = "flat:100000";
    s.ticks = 2500;
  } else if (kind == "gap_double") {
    s.gait = Gait::Caterpillar;
    s.terrain = "flat:107, gap:15, flat:100, gap:11, flat:60";
    s.ticks = 4500;
    s.gap_mode = true;
  } else if (kind == "rough_elastic") {
    s.param = has_param ? param : 1.0;
    if (s.param < 1.0) throw ConfigError("run.scenario: elasticity must be >= 1");
    s.gait = Gait::Tetrapod;
    s.terrain = "flat:40, rough:150:8:" + short_num(s.param) + ", flat:60";
    s.ticks = 6000;
  } else if (kind == "obstacle") {
    s.param = has_param ? param : 8.0;
    s.gait = Gait::Wave;
    s.terrain = "flat:40, obstacle:" + short_num(s.param) + ":20, flat:60";
    s.ticks = 3000;
  } else if (kind == "stairs") {
    s.gait = Gait::Wave;
    s.terrain = "flat:40, stairs:8:3, flat:60";
    s.ticks = 5000;
  } else {
    throw ConfigError("run.scenario: unknown scenario '" + id + "'");
  }
  if (has_param && kind != "rough_elastic" && kind != "obstacle")
    throw ConfigError("run.scenario: '" + kind + "' takes no parameter");
  return s;
}

Scenario RunConfig::scenario() const { return parse_scenario(scenario_id); }

TerrainSpec RunConfig::terrain() const {
  return TerrainSpec::parse(terrain_override.empty() ? scenario().terrain : terrain_override);
}

int RunConfig::run_ticks() const { return ticks > 0 ? ticks : scenario().ticks; }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 step
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void RunConfig::validate() const {
  scenario();
  terrain();
  if (trials < 1) throw ConfigError("run.trials must be >= 1");
  if (ticks < 0) throw ConfigError("run.ticks must be >= 0");
  reservoir.validate();
  if (!(delta_c > 0)) throw ConfigError("rls.delta_c must be > 0");
  if (training.block_ticks < 1) throw ConfigError("training.block_ticks must be >= 1");
  if (training.cycles < 1) throw ConfigError("training.cycles must be >= 1 (no training data)");
  if (training.warmup_ticks < 0) throw ConfigError("training.warmup_ticks must be >= 0");
  if (!(training.readout_noise >= 0)) throw ConfigError("training.readout_noise must be >= 0");
  if (training.transient_ticks < 0 || training.transient_ticks >= training.eval_ticks)
    throw ConfigError("training.transient_ticks must be in [0, eval_ticks)");
  if (pretrain.epochs < 0) throw ConfigError("pretrain.epochs must be >= 0");
  if (pretrain.window < 1 || pretrain.stride < 1) throw ConfigError("pretrain.window/stride must be >= 1");
  gaits.validate();
  plant.validate();
  adaptation.bj.validate();
  if (!(adaptation.gains.limit > 0)) throw ConfigError("adaptation.limit must be > 0");
  if (!(adaptation.error_threshold >= 0)) throw ConfigError("adaptation.error_threshold must be >= 0");
  if (!(baseline.smoothing >= 0 && baseline.smoothing < 1))
    throw ConfigError("baseline.smoothing must be in [0, 1)");
}

RunConfig parse_config(std::string_view ini_text) {
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Keys k(tree);
  RunConfig c;

  k.text("run.scenario", c.scenario_id);
  if (k.has("run.model")) c.model = parse_model(k.raw("run.model"));
  if (k.has("run.seed")) {
    const long s = to_long("run.seed", k.raw("run.seed"));
    if (s < 0) throw ConfigError("run.seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  k.integer("run.trials", c.trials);
  k.integer("run.ticks", c.ticks);
  k.text("run.out", c.out_dir);
  if (k.has("run.corruption")) c.corruption = Corruption::parse(k.raw("run.corruption"));

  k.integer("reservoir.neurons", c.reservoir.neurons);
  k.real("reservoir.g", c.reservoir.recurrent_scale);
  k.real("reservoir.connectivity", c.reservoir.connectivity);
  k.real("reservoir.dt", c.reservoir.dt);
  k.real("reservoir.tau0", c.reservoir.tau0);
  k.real("reservoir.tau_max_factor", c.reservoir.tau_max_factor);
  k.real("reservoir.input_weight_range", c.reservoir.input_weight_range);
  k.real("reservoir.bias_range", c.reservoir.bias_range);

  k.flag("pretrain.enabled", c.training.pretrain);
  k.integer("pretrain.epochs", c.pretrain.epochs);
  k.integer("pretrain.window", c.pretrain.window);
  k.integer("pretrain.stride", c.pretrain.stride);
  k.integer("pretrain.washout", c.pretrain.washout);
  k.integer("pretrain.fit_ticks", c.pretrain.fit_ticks);
  k.integer("pretrain.validation_ticks", c.pretrain.validation_ticks);
  k.integer("pretrain.settle_ticks", c.pretrain.settle_ticks);
  k.real("pretrain.tau_step", c.pretrain.tau_step);
  k.real("pretrain.ridge", c.pretrain.ridge);
  k.real("pretrain.ip_eta", c.pretrain.ip.eta);
  k.real("pretrain.ip_target_mean", c.pretrain.ip.target_mean);
  k.real("pretrain.ip_min_gain", c.pretrain.ip.min_gain);

  k.real("rls.delta_c", c.delta_c);

  k.integer("training.block_ticks", c.training.block_ticks);
  k.integer("training.cycles", c.training.cycles);
  k.integer("training.warmup_ticks", c.training.warmup_ticks);
  k.integer("training.eval_ticks", c.training.eval_ticks);
  k.integer("training.transient_ticks", c.training.transient_ticks);
  k.real("training.readout_noise", c.training.readout_noise);

  bool gaits_changed = false;
  for (Gait g : kAllGaits) {
    const std::string sec = "gait." + std::string(gait_name(g)) + ".";
    GaitSpec& spec = c.gaits[g];
    bool mi_given = false;
    if (k.has(sec + "period")) {
      spec.period = static_cast<int>(to_long(sec + "period", k.raw(sec + "period")));
      gaits_changed = true;
    }
    if (k.has(sec + "mi")) {
      const std::string& v = k.raw(sec + "mi");
      if (v != "auto") {
        spec.mi = to_double(sec + "mi", v);
        mi_given = true;
      }
      gaits_changed = true;
    }
    if (!mi_given && k.has(sec + "period")) spec.mi = mi_for_period(spec.period);
    k.real(sec + "duty", spec.duty);
    if (k.has(sec + "offsets")) {
      const auto list = to_list(sec + "offsets", k.raw(sec + "offsets"));
      if (list.size() != kNumLegs) throw ConfigError(sec + "offsets needs 6 values (R1 R2 R3 L1 L2 L3)");
      std::copy(list.begin(), list.end(), spec.offsets.begin());
      gaits_changed = true;
    }
  }
  if (gaits_changed) c.gaits.derive_delays();

  k.text("terrain.segments", c.terrain_override);

  k.real("plant.body_length", c.plant.body_length);
  k.real("plant.leg_length", c.plant.leg_length);
  k.real("plant.step_advance", c.plant.step_advance);
  k.integer("plant.min_support_legs", c.plant.min_support_legs);
  k.real("plant.foot_placement", c.plant.foot_placement);
  k.real("plant.reach_base", c.plant.reach_base);
  k.real("plant.reach_bj_gain", c.plant.reach_bj_gain);
  k.real("plant.reach_offset_gain", c.plant.reach_offset_gain);
  k.real("plant.clearance_base", c.plant.clearance_base);
  k.real("plant.clearance_ctr_gain", c.plant.clearance_ctr_gain);
  k.real("plant.clearance_bj_gain", c.plant.clearance_bj_gain);
  k.real("plant.strike_window", c.plant.strike_window);
  k.real("plant.dropout_probability", c.plant.dropout_probability);
  k.real("plant.search_relief", c.plant.search_relief);
  k.real("plant.elastic_delay", c.plant.elastic_delay);
  k.real("plant.bump_width", c.plant.bump_width);
  k.real("plant.bump_spacing", c.plant.bump_spacing);
  if (k.has("plant.lag")) {
    const auto list = to_list("plant.lag", k.raw("plant.lag"));
    if (list.size() != kNumGaits) throw ConfigError("plant.lag needs 3 values (wave tetrapod caterpillar)");
    for (int g = 0; g < kNumGaits; ++g) c.plant.lag[g] = static_cast<int>(list[g]);
  }

  k.flag("adaptation.enabled", c.adaptation.enabled);
  k.real("adaptation.k_search", c.adaptation.gains.k_search);
  k.real("adaptation.k_elevation", c.adaptation.gains.k_elevation);
  k.real("adaptation.limit", c.adaptation.gains.limit);
  k.real("adaptation.error_threshold", c.adaptation.error_threshold);

  k.real("bj.threshold", c.adaptation.bj.threshold);
  k.real("bj.gain", c.adaptation.bj.gain_deg);
  k.integer("bj.up_timeout", c.adaptation.bj.up_timeout);
  k.integer("bj.down_timeout", c.adaptation.bj.down_timeout);
  k.real("bj.down_angle", c.adaptation.bj.down_angle);
  k.real("bj.down_rate", c.adaptation.bj.down_rate);
  k.real("bj.limit", c.adaptation.bj.limit);

  k.real("baseline.smoothing", c.baseline.smoothing);
  k.integer("baseline.max_delay", c.baseline.max_delay);

  k.reject_unknown();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string RunConfig::to_ini() const {
  std::ostringstream o;
  auto line = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
  o << "[run]\n";
  line("scenario", scenario_id);
  line("model", std::string(model_name(model)));
  line("seed", std::to_string(seed));
  line("trials", std::to_string(trials));
  line("ticks", std::to_string(run_ticks()));
  line("out", out_dir);
  line("corruption", corruption.to_string());
  o << "\n[reservoir]\n";
  line("neurons", std::to_string(reservoir.neurons));
  line("g", num(reservoir.recurrent_scale));
  line("connectivity", num(reservoir.connectivity));
  line("dt", num(reservoir.dt));
  line("tau0", num(reservoir.tau0));
  line("tau_max_factor", num(reservoir.tau_max_factor));
  line("input_weight_range", num(reservoir.input_weight_range));
  line("bias_range", num(reservoir.bias_range));
  o << "\n[pretrain]\n";
  line("enabled", training.pretrain ? "true" : "false");
  line("epochs", std::to_string(pretrain.epochs));
  line("window", std::to_string(pretrain.window));
  line("stride", std::to_string(pretrain.stride));
  line("washout", std::to_string(pretrain.washout));
  line("fit_ticks", std::to_string(pretrain.fit_ticks));
  line("validation_ticks", std::to_string(pretrain.validation_ticks));
  line("settle_ticks", std::to_string(pretrain.settle_ticks));
  line("tau_step", num(pretrain.tau_step));
  line("ridge", num(pretrain.ridge));
  line("ip_eta", num(pretrain.ip.eta));
  line("ip_target_mean", num(pretrain.ip.target_mean));
  line("ip_min_gain", num(pretrain.ip.min_gain));
  o << "\n[rls]\n";
  line("delta_c", num(delta_c));
  o << "\n[training]\n";
  line("block_ticks", std::to_string(training.block_ticks));
  line("cycles", std::to_string(training.cycles));
  line("warmup_ticks", std::to_string(training.warmup_ticks));
  line("eval_ticks", std::to_string(training.eval_ticks));
  line("transient_ticks", std::to_string(training.transient_ticks));
  line("readout_noise", num(training.readout_noise));
  for (Gait g : kAllGaits) {
    const GaitSpec& s = gaits[g];
    o << "\n[gait." << gait_name(g) << "]\n";
    line("mi", num(s.mi));
    line("period", std::to_string(s.period));
    line("duty", num(s.duty));
    std::string offs;
    for (int i = 0; i < kNumLegs; ++i) offs += (i ? ", " : "") + num(s.offsets[i]);
    line("offsets", offs);
  }
  o << "\n[terrain]\n";
  line("segments", terrain().to_string());
  o << "\n[plant]\n";
  line("body_length", num(plant.body_length));
  line("leg_length", num(plant.leg_length));
  line("step_advance", num(plant.step_advance));
  line("min_support_legs", std::to_string(plant.min_support_legs));
  line("foot_placement", num(plant.foot_placement));
  line("reach_base", num(plant.reach_base));
  line("reach_bj_gain", num(plant.reach_bj_gain));
  line("reach_offset_gain", num(plant.reach_offset_gain));
  line("clearance_base", num(plant.clearance_base));
  line("clearance_ctr_gain", num(plant.clearance_ctr_gain));
  line("clearance_bj_gain", num(plant.clearance_bj_gain));
  line("strike_window", num(plant.strike_window));
  line("dropout_probability", num(plant.dropout_probability));
  line("search_relief", num(plant.search_relief));
  line("elastic_delay", num(plant.elastic_delay));
  line("bump_width", num(plant.bump_width));
  line("bump_spacing", num(plant.bump_spacing));
  line("lag", std::to_string(plant.lag[0]) + ", " + std::to_string(plant.lag[1]) + ", " +
                  std::to_string(plant.lag[2]));
  o << "\n[adaptation]\n";
  line("enabled", adaptation.enabled ? "true" : "false");
  line("k_search", num(adaptation.gains.k_search));
  line("k_elevation", num(adaptation.gains.k_elevation));
  line("limit", num(adaptation.gains.limit));
  line("error_threshold", num(adaptation.error_threshold));
  o << "\n[bj]\n";
  line("threshold", num(adaptation.bj.threshold));
  line("gain", num(adaptation.bj.gain_deg));
  line("up_timeout", std::to_string(adaptation.bj.up_timeout));
  line("down_timeout", std::to_string(adaptation.bj.down_timeout));
  line("down_angle", num(adaptation.bj.down_angle));
  line("down_rate", num(adaptation.bj.down_rate));
  line("limit", num(adaptation.bj.limit));
  o << "\n[baseline]\n";
  line("smoothing", num(baseline.smoothing));
  line("max_delay", std::to_string(baseline.max_delay));
  return o.str();
}

}  // namespace hexfm
