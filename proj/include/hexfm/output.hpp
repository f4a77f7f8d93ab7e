#pragma once

// CSV and SVG emission. Every file carries the effective configuration:
// CSV as leading '#' lines, SVG as a <metadata> block.

#include <string>
#include <vector>

#include "hexfm/harness.hpp"

namespace hexfm {

void write_csv(const std::string& path, const RunLog& log, const std::string& config_ini);
RunLog read_csv(const std::string& path);

void write_sweep_csv(const std::string& path, SweepAxis axis, const std::vector<SweepRow>& rows,
                     const std::string& config_ini);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotPanel {
  std::string title;
  std::string y_label;
  std::vector<Series> series;
};

/// Stacked panels sharing the x axis.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::vector<PlotPanel>& panels, const std::string& config_ini);

/// Black bars where a leg is in stance.
std::string svg_gait_diagram(const std::string& title, const GaitDiagram& diagram,
                             const std::string& config_ini);

/// Panels built from a training log (one per gait column, six legs each).
std::vector<PlotPanel> weight_norm_panels(const RunLog& log);

void write_text(const std::string& path, const std::string& text);

/// `<dir>/<stem>_<scenario>_seed<seed>`.
std::string output_stem(const std::string& dir, const std::string& kind, const RunConfig& cfg);

/// CSV for any log; SVGs only for non-empty logs. Returns the written paths.
std::vector<std::string> emit_outputs(const RunLog& log, const RunConfig& cfg, const std::string& kind);

}  // namespace hexfm
