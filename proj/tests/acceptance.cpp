// End-to-end acceptance checks A1-A10. One line per criterion.
//   acceptance [--only A3,A5] [--allow-fail A1]
// Exit status is nonzero when a criterion fails that is not listed in --allow-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "hexfm/harness.hpp"

using namespace hexfm;

namespace {

// Tolerances.
constexpr double kA1RelChange = 0.01;
constexpr double kA1Seconds = 30.0;
constexpr double kA2RelError = 1e-3;
constexpr double kA2Seconds = 5.0;
constexpr double kA3Nmse = 0.05;
constexpr double kA4NTolerance = 0.20;
constexpr double kA4Seconds = 300.0;
constexpr int kA4Trials = 10;
constexpr double kA5TimingBand = 0.5;
constexpr double kA5TiltUp = 680, kA5TiltDown = 850, kA5Return = 900;
constexpr double kA6Factor = 2.0;
constexpr double kA7Eps = 0.05;
constexpr int kA7MaxTicks = 6000;
constexpr int kA9Trials = 10;
constexpr double kA10Seconds = 60.0;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Context {
  RunConfig cfg;
  std::optional<TrainingResult> training;
  double training_seconds = 0.0;

  const TrainingResult& trained() {
    if (!training) {
      const auto t0 = Clock::now();
      training = run_training(cfg);
      training_seconds = since(t0);
    }
    return *training;
  }
};

Outcome a1(Context& ctx) {
  const auto& tr = ctx.trained();
  double worst = 0.0;
  std::string where;
  bool isolated = true;
  for (const auto& b : tr.blocks) {
    if (b.relative_change > worst) {
      worst = b.relative_change;
      where = fmt("block %d %s %s", b.block, std::string(gait_name(b.gait)).c_str(),
                  std::string(leg_name(b.leg)).c_str());
    }
    isolated = isolated && b.inactive_unchanged;
  }
  int over = 0;
  for (const auto& b : tr.blocks) over += b.relative_change >= kA1RelChange;
  const bool pass = worst < kA1RelChange && isolated && ctx.training_seconds < kA1Seconds;
  return {pass, fmt("worst |W_out| change over final 500 ticks %.4f at %s (tol < %.2f; %d of %zu leg-blocks over); "
                    "inactive columns unchanged: %s; protocol %.1f s (tol < %.0f s)",
                    worst, where.c_str(), kA1RelChange, over, tr.blocks.size(), isolated ? "yes" : "no",
                    ctx.training_seconds, kA1Seconds)};
}

Outcome a2(Context& ctx) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int cases = 0;
  for (Gait g : kAllGaits) {
    for (std::uint64_t seed : {3u, 17u}) {
      RunConfig c = ctx.cfg;
      c.seed = seed;
      const auto rec = record_flat(c, std::vector<Gait>(2000, g), c.training.warmup_ticks);
      ReservoirParams<double> rp = c.reservoir;
      rp.seed = derive_seed(seed, 1);
      auto res = init_reservoir(rp);
      auto rls = rls_init(rp.neurons, 1.0);
      Matrix<double> rates(2000, rp.neurons);
      Vector<double> d(2000);
      for (int t = 0; t < 2000; ++t) {
        reservoir_step(res, rec.u[0][t]);
        rates.row(t) = res.rate.transpose();
        d[t] = rec.fc[0][t];
        rls_step(rls, res.rate, d[t], g);
      }
      const Vector<double> w = batch_ridge_oracle(rates, d, 1.0);
      worst = std::max(worst, (rls.w_out.col(index(g)) - w).norm() / w.norm());
      ++cases;
    }
  }
  const double secs = since(t0);
  return {worst < kA2RelError && secs < kA2Seconds,
          fmt("max relative error vs batch ridge %.3g over %d streams (tol < %.0e); %.2f s (tol < %.0f s)", worst,
              cases, kA2RelError, secs, kA2Seconds)};
}

Outcome a3(Context& ctx) {
  const auto& tr = ctx.trained();
  double worst = 0.0;
  std::string where, table;
  for (Gait g : kAllGaits) {
    const auto ev = evaluate_flat(ctx.cfg, tr.model, g, Corruption{}, ctx.cfg.training.eval_ticks);
    table += std::string(gait_name(g)) + "=[";
    for (Leg leg : kAllLegs) {
      const double v = ev.nmse[index(leg)];
      table += fmt("%.4f%s", v, leg == Leg::L3 ? "] " : " ");
      if (v > worst) {
        worst = v;
        where = std::string(gait_name(g)) + " " + std::string(leg_name(leg));
      }
    }
  }
  return {worst < kA3Nmse, fmt("worst NMSE %.4f at %s (tol < %.2f); %s", worst, where.c_str(), kA3Nmse, table.c_str())};
}

Outcome a4(Context& ctx) {
  const auto t0 = Clock::now();
  const std::array<double, 3> g_values{0.1, 0.95, 1.2};
  const std::array<double, 2> n_values{30, 100};
  const auto g_rows = run_sweep(ctx.cfg, SweepAxis::G, g_values, kA4Trials);
  const auto n_rows = run_sweep(ctx.cfg, SweepAxis::N, n_values, kA4Trials);
  const double secs = since(t0);
  const auto& g01 = g_rows[0];
  const auto& g095 = g_rows[1];
  const auto& g12 = g_rows[2];
  const bool small_g_worse = g01.mean > g095.mean;
  const bool flat_above_one = std::abs(g12.mean - g095.mean) <= g095.stddev;
  const double n_ratio = std::abs(n_rows[0].mean - n_rows[1].mean) / n_rows[1].mean;
  const bool n_close = n_ratio <= kA4NTolerance;
  return {small_g_worse && flat_above_one && n_close && secs < kA4Seconds,
          fmt("MSE g=0.1 %.4g > g=0.95 %.4g: %s; |g=1.2 %.4g - g=0.95| <= std %.4g: %s; "
              "N=30 %.4g vs N=100 %.4g rel %.3f (tol <= %.2f); %.1f s (tol < %.0f s)",
              g01.mean, g095.mean, small_g_worse ? "yes" : "no", g12.mean, g095.stddev, flat_above_one ? "yes" : "no",
              n_rows[0].mean, n_rows[1].mean, n_ratio, kA4NTolerance, secs, kA4Seconds)};
}

struct Episode {
  int up = -1, down = -1, back = -1;
  bool staircase = true;
  double min_angle = 1e9;
};

std::vector<Episode> bj_episodes(const RunLog& log) {
  const auto mode = log.series("bj_mode");
  const auto bj = log.series("bj");
  std::vector<Episode> out;
  for (std::size_t t = 1; t < mode.size(); ++t) {
    const int m = static_cast<int>(mode[t]), prev = static_cast<int>(mode[t - 1]);
    if (m == static_cast<int>(BjMode::TiltUp) && prev == static_cast<int>(BjMode::Normal))
      out.push_back({static_cast<int>(t)});
    if (out.empty()) continue;
    Episode& e = out.back();
    if (m == static_cast<int>(BjMode::TiltUp) && t > 0 && bj[t] < bj[t - 1]) e.staircase = false;
    if (m == static_cast<int>(BjMode::TiltDown) && prev == static_cast<int>(BjMode::TiltUp)) e.down = static_cast<int>(t);
    if (m == static_cast<int>(BjMode::TiltDown)) e.min_angle = std::min(e.min_angle, bj[t]);
    if (m == static_cast<int>(BjMode::Normal) && prev == static_cast<int>(BjMode::TiltDown)) e.back = static_cast<int>(t);
  }
  return out;
}

Outcome a5(Context& ctx) {
  const auto& tr = ctx.trained();
  RunConfig c = ctx.cfg;
  c.scenario_id = "gap_double";
  const auto r = run_scenario(c, tr.model);
  const auto& log = r.log;
  const auto bj = log.series("bj");
  const auto body = log.series("body_x");

  // (i) S grows only on stance ticks of a front leg without contact.
  bool s_ok = true;
  int s_ramps = 0;
  for (const char* leg : {"R1", "L1"}) {
    const auto S = log.series(std::string("S_") + leg);
    const auto u = log.series(std::string("u_") + leg);
    const auto fc = log.series(std::string("fc_") + leg);
    for (std::size_t t = 1; t < S.size(); ++t) {
      if (S[t] > S[t - 1]) {
        ++s_ramps;
        if (!(u[t] < 0.0 && fc[t] == 0.0)) s_ok = false;
      }
    }
  }
  s_ok = s_ok && s_ramps > 0;

  // (ii) one up / down / return episode per gap, in order.
  const TerrainSpec terrain = c.terrain();
  std::vector<const Segment*> gaps;
  for (const auto& s : terrain.segments)
    if (s.kind == SegmentKind::Gap) gaps.push_back(&s);
  const auto eps = bj_episodes(log);
  const double front = 0.5 * c.plant.body_length;
  bool seq_ok = eps.size() == gaps.size() && gaps.size() == 2;
  for (std::size_t k = 0; seq_ok && k < eps.size(); ++k) {
    const Episode& e = eps[k];
    const double hip = body[e.up] + front;
    const bool at_gap = hip >= gaps[k]->start - c.plant.leg_length && hip <= gaps[k]->end();
    seq_ok = e.down > e.up && e.back > e.down && e.staircase && e.min_angle < kBjRestDeg && bj[e.back] == kBjRestDeg &&
             at_gap;
  }

  // (iii) smaller first increment on the shorter gap.
  const auto& inc = r.bj.first_increments;
  const bool inc_ok = inc.size() >= 2 && inc[1] < inc[0];

  // Narrative timings of the first episode.
  bool timing_ok = !eps.empty() && eps[0].down > 0 && eps[0].back > 0;
  auto within = [](double v, double anchor) { return std::abs(v - anchor) <= kA5TimingBand * anchor; };
  if (timing_ok)
    timing_ok = within(eps[0].up, kA5TiltUp) && within(eps[0].down, kA5TiltDown) && within(eps[0].back, kA5Return);

  const bool pass = s_ok && seq_ok && inc_ok && timing_ok && r.progress.success;
  return {pass, fmt("(i) S ramps only in unsupported front stance: %s (%d ramp ticks); (ii) %zu episodes for %zu gaps, "
                    "up/down/return sequence: %s; (iii) first increments %.3f then %.3f: %s; "
                    "first episode up/down/return at %d/%d/%d vs 680/850/900 +-50%%: %s; (iv) success at tick %ld: %s",
                    s_ok ? "yes" : "no", s_ramps, eps.size(), gaps.size(), seq_ok ? "yes" : "no",
                    inc.size() > 0 ? inc[0] : NAN, inc.size() > 1 ? inc[1] : NAN, inc_ok ? "yes" : "no",
                    eps.empty() ? -1 : eps[0].up, eps.empty() ? -1 : eps[0].down, eps.empty() ? -1 : eps[0].back,
                    timing_ok ? "yes" : "no", static_cast<long>(r.progress.success_tick),
                    r.progress.success ? "yes" : "no")};
}

// Runs of v >= 0.5 as [begin, end).
std::vector<std::pair<int, int>> stance_runs(const std::vector<double>& v, int skip) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(v.size());
  for (int t = skip; t < n;) {
    if (v[t] < 0.5) {
      ++t;
      continue;
    }
    int e = t;
    while (e < n && v[e] >= 0.5) ++e;
    out.emplace_back(t, e);
    t = e;
  }
  return out;
}

Outcome a6(Context& ctx) {
  const auto& tr = ctx.trained();
  const int skip = ctx.cfg.training.transient_ticks;
  double worst_ratio = 0.0;
  std::string where;
  bool order_ok = true;
  for (const char* corruption : {"noise:2:300:350", "dropout:280:320"}) {
    const Corruption corr = Corruption::parse(corruption);
    for (Gait g : kAllGaits) {
      const auto clean = evaluate_flat(ctx.cfg, tr.model, g, Corruption{}, ctx.cfg.training.eval_ticks);
      const auto bad = evaluate_flat(ctx.cfg, tr.model, g, corr, ctx.cfg.training.eval_ticks);
      for (Leg leg : kAllLegs) {
        const int i = index(leg);
        const double ratio = bad.nmse[i] / clean.nmse[i];
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          where = fmt("%s %s %s", corruption, std::string(gait_name(g)).c_str(), std::string(leg_name(leg)).c_str());
        }
        const auto truth = stance_runs(bad.fc[i], skip);
        for (const auto& [b, e] : stance_runs(bad.rf[i], skip)) {
          const bool overlaps = std::any_of(truth.begin(), truth.end(), [&](const auto& tr) {
            return tr.first < e && b < tr.second;
          });
          if (!overlaps) order_ok = false;
        }
      }
    }
  }
  return {worst_ratio <= kA6Factor && order_ok,
          fmt("worst corrupted/clean NMSE ratio %.3f at %s (tol <= %.1f); every predicted contact interval overlaps a "
              "true one: %s",
              worst_ratio, where.c_str(), kA6Factor, order_ok ? "yes" : "no")};
}

Outcome a7(Context& ctx) {
  const auto& tr = ctx.trained();
  RunConfig c = ctx.cfg;
  c.scenario_id = "rough_elastic(1)";
  c.ticks = std::max(c.run_ticks(), kA7MaxTicks);
  const auto r = run_scenario(c, tr.model);
  const TerrainSpec terrain = c.terrain();
  const Segment* rough = nullptr;
  for (const auto& s : terrain.segments)
    if (s.kind == SegmentKind::Rough) rough = &s;
  const auto body = r.log.series("body_x");
  const double half = 0.5 * c.plant.body_length;
  double inside_max = 0.0, after_max = 0.0;
  int after_ticks = 0;
  std::vector<std::vector<double>> acc;
  for (Leg leg : kAllLegs) {
    acc.push_back(r.log.series("S_" + std::string(leg_name(leg))));
    acc.push_back(r.log.series("E_" + std::string(leg_name(leg))));
  }
  // "After" starts one phase past the moment the rear hips leave the rough strip.
  int exit_tick = -1;
  for (std::size_t t = 0; t < body.size(); ++t) {
    const bool in_rough = body[t] + half > rough->start && body[t] - half < rough->end();
    if (exit_tick < 0 && body[t] - half >= rough->end()) exit_tick = static_cast<int>(t);
    for (const auto& a : acc) {
      if (in_rough) inside_max = std::max(inside_max, std::abs(a[t]));
    }
  }
  const int settle = c.gaits[Gait::Tetrapod].period;
  if (exit_tick >= 0) {
    for (std::size_t t = static_cast<std::size_t>(exit_tick + settle); t < body.size(); ++t) {
      ++after_ticks;
      for (const auto& a : acc) after_max = std::max(after_max, std::abs(a[t]));
    }
  }
  const bool success = r.progress.success && r.progress.success_tick <= kA7MaxTicks;
  const bool pass = inside_max > 0.0 && exit_tick >= 0 && after_ticks > 0 && after_max < kA7Eps && success;
  return {pass, fmt("max accumulated error inside rough %.3f (> 0); after exit (tick %d + %d) max %.3g over %d ticks "
                    "(tol < %.2f); success at tick %ld (tol <= %d)",
                    inside_max, exit_tick, settle, after_max, after_ticks, kA7Eps,
                    static_cast<long>(r.progress.success_tick), kA7MaxTicks)};
}

Outcome a8(Context& ctx) {
  const auto& tr = ctx.trained();
  bool kl_ok = true, tau_ok = true;
  double kl0 = 0, kl20 = 0, min_var = INFINITY;
  for (Leg leg : kAllLegs) {
    const auto& rep = tr.pretrain[index(leg)];
    if (rep.kl.size() < 21) {
      kl_ok = false;
      continue;
    }
    kl0 += rep.kl.front() / kNumLegs;
    kl20 += rep.kl.back() / kNumLegs;
    if (!(rep.kl.back() < rep.kl.front())) kl_ok = false;
    const auto& tau = tr.model.bank.reservoirs[index(leg)].tau;
    const double mean = tau.mean();
    const double var = (tau.array() - mean).square().mean();
    min_var = std::min(min_var, var);
    if (!(var > 0.0)) tau_ok = false;
  }
  return {kl_ok && tau_ok, fmt("KL epoch 0 -> 20 (mean over legs) %.4f -> %.4f, strictly lower on every leg: %s; "
                               "min tau variance %.4g (> 0): %s",
                               kl0, kl20, kl_ok ? "yes" : "no", min_var, tau_ok ? "yes" : "no")};
}

Outcome a9(Context& ctx) {
  const auto& tr = ctx.trained();
  const std::array<double, 3> levels{1.0, 5.0, 10.0};
  const std::array<ModelKind, 2> models{ModelKind::Reservoir, ModelKind::Baseline};
  const auto rows = run_sweep(ctx.cfg, SweepAxis::Elasticity, levels, kA9Trials, &tr.model, models);
  std::array<std::array<double, 3>, 2> mean{};
  for (const auto& r : rows) {
    const int m = r.model == ModelKind::Reservoir ? 0 : 1;
    const int l = static_cast<int>(std::find(levels.begin(), levels.end(), r.value) - levels.begin());
    mean[m][l] = r.mean;
  }
  bool lower = true, mono = true;
  for (int l = 0; l < 3; ++l) lower = lower && mean[0][l] < mean[1][l];
  for (int m = 0; m < 2; ++m)
    for (int l = 1; l < 3; ++l) mono = mono && mean[m][l] >= mean[m][l - 1];
  return {lower && mono, fmt("mean success tick reservoir %.1f/%.1f/%.1f vs baseline %.1f/%.1f/%.1f at e=1/5/10 "
                             "(%d trials): reservoir lower: %s; non-decreasing: %s",
                             mean[0][0], mean[0][1], mean[0][2], mean[1][0], mean[1][1], mean[1][2], kA9Trials,
                             lower ? "yes" : "no", mono ? "yes" : "no")};
}

// Randomized structural properties.
Outcome a10(Context& ctx) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checks = 0;
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok && std::find(failed.begin(), failed.end(), what) == failed.end()) failed.push_back(what);
  };

  for (int trial = 0; trial < 20; ++trial) {
    // Reservoir boundedness.
    ReservoirParams<double> rp;
    rp.neurons = 5 + static_cast<int>(unit(rng) * 60);
    rp.recurrent_scale = 0.1 + 1.9 * unit(rng);
    rp.connectivity = 0.05 + 0.95 * unit(rng);
    rp.tau0 = 1.0 + 10.0 * unit(rng);
    rp.seed = rng();
    auto res = init_reservoir(rp);
    double wmax = 0.0;
    for (int k = 0; k < res.w_rec.outerSize(); ++k)
      for (decltype(res.w_rec)::InnerIterator it(res.w_rec, k); it; ++it) wmax = std::max(wmax, std::abs(it.value()));
    const double umax = 5.0;
    const double xbound = (rp.recurrent_scale * rp.neurons * wmax + res.w_in.cwiseAbs().maxCoeff() * umax +
                           res.bias.cwiseAbs().maxCoeff()) *
                          (res.tau.maxCoeff() / res.dt);
    std::normal_distribution<double> un(0.0, 2.0);
    bool bounded = true;
    for (int t = 0; t < 300; ++t) {
      reservoir_step(res, std::clamp(un(rng), -umax, umax));
      bounded = bounded && res.rate.cwiseAbs().maxCoeff() <= 1.0 && res.potential.cwiseAbs().maxCoeff() <= xbound;
    }
    expect(bounded, "reservoir boundedness");

    // RLS: P symmetric, positive definite, other columns untouched.
    auto rls = rls_init(rp.neurons, std::pow(10.0, -4.0 + 4.0 * unit(rng)));
    const Gait g = kAllGaits[rng() % 3];
    const Matrix<double> before = rls.w_out;
    bool sym = true;
    for (int t = 0; t < 200; ++t) {
      reservoir_step(res, un(rng));
      rls_step(rls, res.rate, unit(rng), g);
      const auto& p = rls.p(g);
      sym = sym && (p - p.transpose()).cwiseAbs().maxCoeff() == 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix<double>> es(rls.p(g));
    expect(sym, "P symmetry");
    expect(es.eigenvalues().minCoeff() > 0.0, "P positive definite");
    bool others = true;
    for (Gait o : kAllGaits)
      if (o != g) others = others && rls.w_out.col(index(o)) == before.col(index(o));
    expect(others, "readout column isolation");

    // Accumulators: S zero on every swing tick after the first, E zero on stance ticks.
    AccumulatorPair acc;
    Phase prev = Phase::Swing;
    bool resets = true;
    for (int t = 0; t < 400; ++t) {
      const Phase ph = unit(rng) < 0.5 ? prev : (prev == Phase::Stance ? Phase::Swing : Phase::Stance);
      accumulate_step(acc, 2.0 * unit(rng) - 1.0, ph, kDefaultErrorThreshold * unit(rng));
      if (ph == Phase::Swing) resets = resets && acc.S == 0.0;
      if (ph == Phase::Stance) resets = resets && acc.E == 0.0;
      resets = resets && acc.S >= 0.0 && acc.E >= 0.0;
      const LegOffsets off = leg_offsets(acc, ph, OffsetGains{});
      resets = resets && std::abs(off.ctr) <= 0.5 && std::abs(off.tc) <= 0.5 && std::abs(off.fti) <= 0.5;
      prev = ph;
    }
    expect(resets, "accumulator resets and offset limits");

    // BJ angle stays within limits.
    BjState bjs;
    BjParams bp;
    bool bj_ok = true;
    for (int t = 0; t < 1000; ++t) {
      bj_update(bjs, 10.0 * unit(rng), unit(rng) < 0.05, bp);
      bj_ok = bj_ok && std::abs(bjs.angle) <= bp.limit;
    }
    expect(bj_ok, "BJ angle limits");
  }

  // Leg independence: perturbing one leg's input leaves the other legs' predictions unchanged.
  {
    const auto& tr = ctx.trained();
    ForwardModelBank a = tr.model.bank, b = tr.model.bank;
    a.reset_dynamics();
    b.reset_dynamics();
    bool indep = true;
    for (int t = 0; t < 300; ++t) {
      const double u = std::sin(0.07 * t);
      for (Leg leg : kAllLegs) {
        const double ra = fm_predict_step(a, leg, u, Gait::Wave);
        const double rb = fm_predict_step(b, leg, leg == Leg::R2 ? -u : u, Gait::Wave);
        if (leg != Leg::R2) indep = indep && ra == rb;
      }
    }
    expect(indep, "leg independence");
  }

  // Determinism: identical config gives identical closed-loop logs; plant contact stays in [0, 1].
  {
    const auto& tr = ctx.trained();
    for (const char* sc : {"rough_elastic(5)", "gap_double"}) {
      RunConfig c = ctx.cfg;
      c.scenario_id = sc;
      c.ticks = 1500;
      c.seed = rng();
      const auto r1 = run_scenario(c, tr.model);
      const auto r2 = run_scenario(c, tr.model);
      expect(r1.log.rows == r2.log.rows, "closed-loop determinism");
      bool range = true;
      for (Leg leg : kAllLegs)
        for (double v : r1.log.series("fc_" + std::string(leg_name(leg)))) range = range && v >= 0.0 && v <= 1.0;
      expect(range, "contact range");
      const auto body = r1.log.series("body_x");
      expect(std::is_sorted(body.begin(), body.end()), "body_x non-decreasing");
    }
  }

  const double secs = since(t0);
  std::string bad;
  for (const auto& f : failed) bad += (bad.empty() ? "" : ", ") + f;
  return {failed.empty() && secs < kA10Seconds,
          fmt("%d property checks over randomized configurations, failures: %s; %.1f s (tol < %.0f s)", checks,
              failed.empty() ? "none" : bad.c_str(), secs, kA10Seconds)};
}

std::set<std::string> parse_list(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.insert(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only, allowed;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) only = parse_list(argv[++i]);
    else if (a == "--allow-fail" && i + 1 < argc) allowed = parse_list(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--only A1,A2] [--allow-fail A1]\n");
      return 2;
    }
  }

  Context ctx;
  const std::vector<std::pair<std::string, std::function<Outcome(Context&)>>> criteria{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}};
  int unexpected = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = fn(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = allowed.count(id) > 0;
    std::printf("%-3s %s  %s%s\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                !o.pass && known ? "  [known failure]" : "");
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
