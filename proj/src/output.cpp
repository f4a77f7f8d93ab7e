#include "hexfm/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hexfm {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void echo_config(std::ostream& o, const std::string& ini) {
  std::istringstream in(ini);
  for (std::string line; std::getline(in, line);) o << "# " << line << "\n";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string metadata(const std::string& ini) {
  return "<metadata id=\"config\"><![CDATA[\n" + ini + "]]></metadata>\n";
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '(' || c == ')' || c == ':' || c == ',' || c == ' ') c = '_';
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream o(path);
  if (!o) throw InputError("cannot write '" + path + "'");
  o << text;
  if (!o) throw InputError("failed writing '" + path + "'");
}

void write_csv(const std::string& path, const RunLog& log, const std::string& config_ini) {
  std::ostringstream o;
  echo_config(o, config_ini);
  for (std::size_t c = 0; c < log.columns.size(); ++c) o << (c ? "," : "") << log.columns[c];
  o << "\n";
  for (const auto& row : log.rows) {
    if (row.size() != log.columns.size()) throw InputError("write_csv: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) o << (c ? "," : "") << fmt(row[c]);
    o << "\n";
  }
  write_text(path, o.str());
}

RunLog read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  RunLog log;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!header) {
      log.columns = std::move(cells);
      header = true;
      continue;
    }
    if (cells.size() != log.columns.size())
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(log.columns.size()) + " fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw InputError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    log.rows.push_back(std::move(row));
  }
  if (!header) throw InputError(path + ": missing header");
  return log;
}

void write_sweep_csv(const std::string& path, SweepAxis axis, const std::vector<SweepRow>& rows,
                     const std::string& config_ini) {
  std::ostringstream o;
  echo_config(o, config_ini);
  const bool mse = axis != SweepAxis::Elasticity;
  o << axis_name(axis) << ",model,trials,successes," << (mse ? "mse_mean,mse_std" : "success_tick_mean,success_tick_std")
    << ",samples\n";
  for (const auto& r : rows) {
    o << fmt(r.value) << "," << model_name(r.model) << "," << r.samples.size() << "," << r.successes << ","
      << fmt(r.mean) << "," << fmt(r.stddev) << ",";
    for (std::size_t k = 0; k < r.samples.size(); ++k) o << (k ? ";" : "") << fmt(r.samples[k]);
    o << "\n";
  }
  write_text(path, o.str());
}

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::vector<PlotPanel>& panels, const std::string& config_ini) {
  const double width = 900, left = 70, right = 150, top = 40, panel_h = 170, gap = 45;
  const double plot_w = width - left - right;
  const double height = top + panels.size() * (panel_h + gap) + 10;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << metadata(config_ini);
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& panel = panels[p];
    const double y0 = top + p * (panel_h + gap);
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : panel.series)
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.y[k])) continue;
        xmin = std::min(xmin, s.x[k]);
        xmax = std::max(xmax, s.x[k]);
        ymin = std::min(ymin, s.y[k]);
        ymax = std::max(ymax, s.y[k]);
      }
    if (!std::isfinite(xmin)) xmin = 0.0;
    if (!(xmin < xmax)) xmax = xmin + 1.0;
    if (!std::isfinite(ymin)) ymin = 0.0;
    if (!(ymin < ymax)) {
      ymin -= 0.5;
      ymax = ymin + 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return y0 + panel_h - (y - ymin) / (ymax - ymin) * panel_h; };

    o << "<g>\n<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << plot_w << "\" height=\"" << panel_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << left << "\" y=\"" << y0 - 6 << "\" font-size=\"12\">" << xml_escape(panel.title)
      << "</text>\n";
    o << "<text transform=\"translate(16," << y0 + panel_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(panel.y_label) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
      const double yv = ymin + k * (ymax - ymin) / 4;
      const double xv = xmin + k * (xmax - xmin) / 4;
      o << "<text x=\"" << left - 4 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << fmt_short(yv)
        << "</text>\n";
      o << "<text x=\"" << px(xv) << "\" y=\"" << y0 + panel_h + 14 << "\" text-anchor=\"middle\">"
        << fmt_short(xv) << "</text>\n";
    }
    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const Series& ser = panel.series[s];
      const char* colour = kPalette[s % std::size(kPalette)];
      o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
      // At most ~2 points per horizontal pixel.
      const std::size_t n = std::min(ser.x.size(), ser.y.size());
      const std::size_t stride = std::max<std::size_t>(1, n / static_cast<std::size_t>(2 * plot_w));
      for (std::size_t k = 0; k < n; k += stride)
        if (std::isfinite(ser.y[k])) o << fmt_short(px(ser.x[k])) << "," << fmt_short(py(ser.y[k])) << " ";
      o << "\"/>\n";
      o << "<text x=\"" << left + plot_w + 10 << "\" y=\"" << y0 + 14 + 14 * s << "\" fill=\"" << colour << "\">"
        << xml_escape(ser.label) << "</text>\n";
    }
    o << "</g>\n";
  }
  o << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 4 << "\" text-anchor=\"middle\">"
    << xml_escape(x_label) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string svg_gait_diagram(const std::string& title, const GaitDiagram& diagram,
                             const std::string& config_ini) {
  const double left = 50, top = 40, row_h = 22, width = 900;
  const double plot_w = width - left - 20;
  const long ticks = diagram.cols();
  const double height = top + kNumLegs * row_h + 40;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << metadata(config_ini);
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  const double scale = ticks > 0 ? plot_w / static_cast<double>(ticks) : 1.0;
  for (Leg leg : kAllLegs) {
    const int i = index(leg);
    const double y = top + i * row_h;
    o << "<text x=\"" << left - 6 << "\" y=\"" << y + row_h * 0.7 << "\" text-anchor=\"end\">" << leg_name(leg)
      << "</text>\n";
    for (long t = 0; t < ticks;) {
      if (!diagram(i, t)) {
        ++t;
        continue;
      }
      long e = t;
      while (e < ticks && diagram(i, e)) ++e;
      o << "<rect x=\"" << fmt_short(left + t * scale) << "\" y=\"" << y + 3 << "\" width=\""
        << fmt_short((e - t) * scale) << "\" height=\"" << row_h - 6 << "\" fill=\"black\"/>\n";
      t = e;
    }
  }
  o << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 8
    << "\" text-anchor=\"middle\">tick (black: stance)</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::vector<PlotPanel> weight_norm_panels(const RunLog& log) {
  std::vector<PlotPanel> panels;
  const auto tick = log.series("tick");
  for (Gait g : kAllGaits) {
    PlotPanel p;
    p.title = "readout " + std::string(gait_name(g));
    p.y_label = "|W_out|";
    for (Leg leg : kAllLegs) {
      const std::string col = "w_" + std::string(gait_name(g)) + "_" + std::string(leg_name(leg));
      if (log.column(col) < 0) continue;
      p.series.push_back({std::string(leg_name(leg)), tick, log.series(col)});
    }
    panels.push_back(std::move(p));
  }
  return panels;
}

std::string output_stem(const std::string& dir, const std::string& kind, const RunConfig& cfg) {
  return (std::filesystem::path(dir) /
          (kind + "_" + sanitize(cfg.scenario().id()) + "_" + std::string(model_name(cfg.model)) + "_seed" +
           std::to_string(cfg.seed)))
      .string();
}

namespace {

std::vector<double> window(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return {v.begin() + static_cast<long>(std::min(from, v.size())),
          v.begin() + static_cast<long>(std::min(to, v.size()))};
}

GaitDiagram diagram_from_log(const RunLog& log, std::size_t from, std::size_t to) {
  GaitDiagram d(kNumLegs, static_cast<Eigen::Index>(to - from));
  for (Leg leg : kAllLegs) {
    const auto u = log.series("u_" + std::string(leg_name(leg)));
    for (std::size_t t = from; t < to; ++t) d(index(leg), static_cast<Eigen::Index>(t - from)) = u[t] < 0.0;
  }
  return d;
}

}  // namespace

std::vector<std::string> emit_outputs(const RunLog& log, const RunConfig& cfg, const std::string& kind) {
  const std::string ini = cfg.to_ini();
  const std::string stem = output_stem(cfg.out_dir, kind, cfg);
  std::vector<std::string> paths{stem + ".csv"};
  write_csv(paths.back(), log, ini);
  if (log.empty()) return paths;

  const auto tick = log.series("tick");
  const std::size_t n = log.rows.size();
  const std::string leg = "R1";

  if (log.column("w_wave_R1") >= 0) {
    paths.push_back(stem + "_weights.svg");
    write_text(paths.back(), svg_line_plot("Readout weight norms", "tick", weight_norm_panels(log), ini));
  }

  if (log.column("u_R1") >= 0 && log.column("rf_R1") >= 0) {
    // Last 400 ticks of each contiguous gait run, or the whole run.
    std::vector<PlotPanel> panels;
    const auto gait = log.series("gait");
    std::size_t start = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      if (t < n && gait[t] == gait[start]) continue;
      const std::size_t from = t - std::min<std::size_t>(400, t - start);
      if (panels.size() < 3 || t == n) {
        PlotPanel p;
        p.title = std::string(gait_name(static_cast<Gait>(static_cast<int>(gait[start])))) + " " + leg +
                  ", ticks " + std::to_string(from) + "-" + std::to_string(t - 1);
        p.y_label = "signal";
        const auto x = window(tick, from, t);
        p.series.push_back({"u (CTr)", x, window(log.series("u_" + leg), from, t)});
        p.series.push_back({"FC", x, window(log.series("fc_" + leg), from, t)});
        p.series.push_back({"RF", x, window(log.series("rf_" + leg), from, t)});
        if (panels.size() == 3) panels.back() = std::move(p);
        else panels.push_back(std::move(p));
      }
      start = t;
    }
    paths.push_back(stem + "_signals.svg");
    write_text(paths.back(), svg_line_plot("Forward model " + leg, "tick", panels, ini));

    const std::size_t from = n > 600 ? n - 600 : 0;
    paths.push_back(stem + "_gait.svg");
    write_text(paths.back(), svg_gait_diagram("Gait diagram, ticks " + std::to_string(from) + "-" +
                                                  std::to_string(n - 1),
                                              diagram_from_log(log, from, n), ini));
  }

  if (log.column("bj") >= 0) {
    std::vector<PlotPanel> panels;
    for (const char* l : {"R1", "L1"}) {
      PlotPanel p;
      p.title = std::string("accumulated errors ") + l;
      p.y_label = "S / E";
      p.series.push_back({std::string("S ") + l, tick, log.series(std::string("S_") + l)});
      p.series.push_back({std::string("E ") + l, tick, log.series(std::string("E_") + l)});
      panels.push_back(std::move(p));
    }
    panels.push_back({"backbone joint", "deg", {{"BJ", tick, log.series("bj")}}});
    panels.push_back({"body position", "cm", {{"body_x", tick, log.series("body_x")}}});
    paths.push_back(stem + "_bj.svg");
    write_text(paths.back(), svg_line_plot("Adaptation " + cfg.scenario().id(), "tick", panels, ini));
  }
  return paths;
}

}  // namespace hexfm
