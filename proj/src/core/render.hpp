#pragma once

#include <string>
#include <vector>

#include "core/env.hpp"
#include "core/strategic.hpp"

namespace ssx {

struct RenderOptions {
  int cell_px = 24;
  int strip_cell_px = 12;
  int samples_per_strip = 4;
};

/// Explanation picture. Four Rooms: one board with cells colored by
/// meta-state and strategic markers sized by priority. MiniPac: one strip per
/// meta-state of sample member boards plus the priority strategic state on a
/// pink background. Output is pure SVG text with no timestamps.
std::string render_explanation(const Env& env, const StateSpace& space,
                               const MetaStatePartition& partition,
                               const StrategicSelection& selection,
                               const RenderOptions& options = {});

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line plot used by the evaluation studies.
std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<PlotSeries>& series);

const std::vector<std::string>& meta_state_palette();

}  // namespace ssx
