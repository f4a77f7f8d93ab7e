#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hexfm/output.hpp"

using namespace hexfm;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(std::uint64_t seed) {
  RunConfig c = parse_config(R"(
[pretrain]
epochs = 2
window = 400
stride = 400

[training]
block_ticks = 600
cycles = 1
eval_ticks = 600
)");
  c.seed = seed;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hexfm_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const TrainingResult& trained_seed1() {
  static const TrainingResult tr = run_training(small_config(1));
  return tr;
}

}  // namespace

TEST_CASE("training_schedule: wave, tetrapod, caterpillar blocks per cycle") {
  TrainingOptions opt;
  opt.block_ticks = 3;
  opt.cycles = 2;
  const auto s = training_schedule(opt);
  const std::vector<Gait> expect = {Gait::Wave,        Gait::Wave,        Gait::Wave,     Gait::Tetrapod,
                                    Gait::Tetrapod,    Gait::Tetrapod,    Gait::Caterpillar, Gait::Caterpillar,
                                    Gait::Caterpillar, Gait::Wave,        Gait::Wave,     Gait::Wave,
                                    Gait::Tetrapod,    Gait::Tetrapod,    Gait::Tetrapod, Gait::Caterpillar,
                                    Gait::Caterpillar, Gait::Caterpillar};
  CHECK(s == expect);
  opt.cycles = 0;
  CHECK_THROWS_AS(training_schedule(opt), ConfigError);
}

TEST_CASE("nmse: normalisation by target variance") {
  const std::vector<double> d = {0, 1, 0, 1, 1, 0, 1, 0};
  CHECK(nmse(d, d, 0) == 0.0);
  const std::vector<double> mean(d.size(), 0.5);
  CHECK(nmse(mean, d, 0) == doctest::Approx(1.0));
  std::vector<double> off = d;
  off[7] = 1.0;  // one wrong sample: mse 1/8, var 1/4
  CHECK(nmse(off, d, 0) == doctest::Approx(0.5));
  const std::vector<double> flat(8, 1.0);
  CHECK_THROWS(nmse(d, flat, 0));
}

TEST_CASE("run_training: inactive readout columns are untouched") {
  const auto& tr = trained_seed1();
  REQUIRE_FALSE(tr.blocks.empty());
  for (const auto& b : tr.blocks) CHECK(b.inactive_unchanged);
  CHECK(tr.log.rows.size() == 3u * 600u);
  CHECK(tr.log.column("w_wave_R1") >= 0);
}

TEST_CASE("weights: same seed gives bit-identical files; load round-trips") {
  const fs::path dir = scratch("weights");
  save_weights((dir / "a.txt").string(), trained_seed1().model, small_config(1));
  const TrainingResult again = run_training(small_config(1));
  save_weights((dir / "b.txt").string(), again.model, small_config(1));
  CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));

  const TrainedModel loaded = load_weights((dir / "a.txt").string());
  save_weights((dir / "c.txt").string(), loaded, small_config(1));
  CHECK(slurp(dir / "a.txt") == slurp(dir / "c.txt"));

  const RunConfig cfg = small_config(1);
  const auto e1 = evaluate_flat(cfg, trained_seed1().model, Gait::Tetrapod, Corruption{}, 300);
  const auto e2 = evaluate_flat(cfg, loaded, Gait::Tetrapod, Corruption{}, 300);
  CHECK(e1.rf == e2.rf);

  CHECK_THROWS_AS(load_weights((dir / "missing.txt").string()), InputError);
  std::ofstream(dir / "junk.txt") << "not weights\n";
  CHECK_THROWS(load_weights((dir / "junk.txt").string()));
}

TEST_CASE("outputs: empty log gives a header-only CSV and no SVG") {
  RunConfig cfg = small_config(3);
  cfg.out_dir = scratch("empty").string();
  RunLog log;
  log.columns = {"tick", "rf_R1", "fc_R1"};
  const auto paths = emit_outputs(log, cfg, "run");
  REQUIRE(paths.size() == 1);
  CHECK(fs::path(paths[0]).extension() == ".csv");
  std::ifstream in(paths[0]);
  int config_lines = 0, other = 0;
  std::string header;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] == '#') ++config_lines;
    else if (header.empty()) header = line;
    else ++other;
  }
  CHECK(config_lines > 10);
  CHECK(header == "tick,rf_R1,fc_R1");
  CHECK(other == 0);
}

TEST_CASE("outputs: CSV re-parse reproduces the summary exactly") {
  RunConfig cfg = small_config(1);
  cfg.out_dir = scratch("reparse").string();
  const auto& log = trained_seed1().log;
  const std::string path = (fs::path(cfg.out_dir) / "log.csv").string();
  write_csv(path, log, cfg.to_ini());
  const RunLog back = read_csv(path);
  CHECK(back.columns == log.columns);
  CHECK(back.rows == log.rows);
  CHECK(summarize(back) == summarize(log));

  std::ifstream in(path);
  std::string ini;
  for (std::string line; std::getline(in, line) && line.rfind("#", 0) == 0;) ini += line.substr(2) + "\n";
  CHECK(parse_config(ini).to_ini() == cfg.to_ini());
}

TEST_CASE("outputs: training log renders a three-panel weight plot with the config embedded") {
  RunConfig cfg = small_config(1);
  cfg.out_dir = scratch("svg").string();
  const auto panels = weight_norm_panels(trained_seed1().log);
  REQUIRE(panels.size() == 3);
  for (const auto& p : panels) CHECK(p.series.size() == kNumLegs);

  const auto paths = emit_outputs(trained_seed1().log, cfg, "train");
  std::string weights_svg;
  for (const auto& p : paths)
    if (p.find("_weights.svg") != std::string::npos) weights_svg = p;
  REQUIRE_FALSE(weights_svg.empty());
  const std::string svg = slurp(weights_svg);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<metadata") != std::string::npos);
  CHECK(svg.find("delta_c = 0.0001") != std::string::npos);
  std::size_t rects = 0;
  for (std::size_t k = svg.find("<g>\n<rect"); k != std::string::npos; k = svg.find("<g>\n<rect", k + 1)) ++rects;
  CHECK(rects == 3);
}

TEST_CASE("summarize: per-leg NMSE against an independent computation") {
  RunLog log;
  log.columns = {"tick", "gait", "body_x", "rf_R1", "fc_R1"};
  std::vector<double> rf, fc;
  for (int t = 0; t < 200; ++t) {
    const double f = (t / 10) % 2 == 0 ? 1.0 : 0.0;
    const double r = 0.8 * f + 0.1;
    log.rows.push_back({double(t), 0.0, 0.5 * t, r, f});
    if (t >= 20) {
      rf.push_back(r);
      fc.push_back(f);
    }
  }
  double mse = 0, mean = 0, var = 0;
  for (double v : fc) mean += v / fc.size();
  for (std::size_t i = 0; i < fc.size(); ++i) {
    mse += (rf[i] - fc[i]) * (rf[i] - fc[i]) / fc.size();
    var += (fc[i] - mean) * (fc[i] - mean) / fc.size();
  }
  const auto s = summarize(log, 20);
  CHECK(s.at("nmse.R1") == doctest::Approx(mse / var));
  CHECK(s.at("final_body_x") == doctest::Approx(99.5));
  CHECK(s.at("rows") == 200);
}
