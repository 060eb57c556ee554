#include "core/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "core/errors.hpp"

namespace ssx {

namespace {

// MiniPac board colors (pacman green, ghost red / yellow when edible, pill
// cyan, food blue, eaten black, walls white -- pink on strategic panels).
constexpr const char* kPacman = "#00FF00";
constexpr const char* kGhost = "#FF0000";
constexpr const char* kGhostEdible = "#FFFF00";
constexpr const char* kPill = "#00FFFF";
constexpr const char* kFood = "#0000FF";
constexpr const char* kEaten = "#000000";
constexpr const char* kWall = "#FFFFFF";
constexpr const char* kWallStrategic = "#FFC0CB";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void rect(std::string& svg, double x, double y, double w, double h,
          const std::string& fill, const std::string& extra = "") {
  svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"" + extra + "/>\n";
}

void text(std::string& svg, double x, double y, int size, const std::string& s) {
  svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
         std::to_string(size) + "\" font-family=\"sans-serif\">" + s + "</text>\n";
}

std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) +
         "\">\n";
}

bool any_degenerate(const StrategicSelection& sel) {
  for (const auto& s : sel.sets)
    if (s.degenerate) return true;
  return false;
}

std::string render_four_rooms(const FourRoomsEnv& env, const StateSpace& space,
                              const MetaStatePartition& partition,
                              const StrategicSelection& sel,
                              const RenderOptions& opt) {
  const Grid& grid = env.grid();
  const double cs = opt.cell_px;
  const double margin = cs;
  const bool banner = any_degenerate(sel);
  const double banner_h = banner ? cs : 0.0;
  const double w = margin * 2 + cs * grid.cols();
  const double h = margin * 2 + cs * grid.rows() + banner_h;

  std::string svg = svg_open(w, h);
  rect(svg, 0, 0, w, h, "#f7f7f7");
  if (banner)
    text(svg, margin, margin * 0.75, opt.cell_px * 2 / 3,
         "warning: degenerate strategic set (all out-path counts zero)");

  const double y0 = margin + banner_h;
  auto cell_xy = [&](Cell c) {
    return std::pair<double, double>{margin + cs * c.col, y0 + cs * c.row};
  };

  const auto& palette = meta_state_palette();
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      const auto [x, y] = cell_xy(Cell{r, c});
      if (grid.wall(r, c)) {
        rect(svg, x, y, cs, cs, "#333333");
        continue;
      }
      GridState s;
      s.agent = Cell{r, c};
      const int idx = space.find(env, s);
      std::string fill = "#ffffff";
      if (idx >= 0) {
        const int m = partition.assignment[static_cast<std::size_t>(idx)];
        fill = palette[static_cast<std::size_t>(m) % palette.size()];
      }
      rect(svg, x, y, cs, cs, fill, " fill-opacity=\"0.55\" stroke=\"#cccccc\"");
    }

  // Strategic markers, sized by priority (first pick largest).
  for (const auto& set : sel.sets) {
    for (std::size_t rank = 0; rank < set.states.size(); ++rank) {
      const GridState& s =
          space.states[static_cast<std::size_t>(set.states[rank])];
      const auto [x, y] = cell_xy(s.agent);
      const double radius = (rank == 0 ? 0.42 : 0.26) * cs;
      svg += "<circle cx=\"" + num(x + cs / 2) + "\" cy=\"" + num(y + cs / 2) +
             "\" r=\"" + num(radius) + "\" fill=\"" +
             meta_state_palette()[static_cast<std::size_t>(set.meta_state) %
                                  meta_state_palette().size()] +
             "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
    }
  }

  // Goal marker: a black X.
  {
    const auto [x, y] = cell_xy(env.goal());
    const double p = cs * 0.2;
    svg += "<path d=\"M" + num(x + p) + " " + num(y + p) + " L" + num(x + cs - p) +
           " " + num(y + cs - p) + " M" + num(x + cs - p) + " " + num(y + p) +
           " L" + num(x + p) + " " + num(y + cs - p) +
           "\" stroke=\"#000000\" stroke-width=\"3\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void render_minipac_board(std::string& svg, const MiniPacEnv& env,
                          const GridState& s, double x0, double y0, double cs,
                          bool strategic) {
  const Grid& grid = env.grid();
  const double w = cs * grid.cols();
  const double h = cs * grid.rows();
  if (strategic)  // pink frame marks the strategic panel
    rect(svg, x0 - cs * 0.5, y0 - cs * 0.5, w + cs, h + cs, kWallStrategic);
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      const Cell here{r, c};
      std::string fill = kEaten;
      if (grid.wall(here)) {
        fill = strategic ? kWallStrategic : kWall;
      } else if (s.agent == here) {
        fill = kPacman;
      } else if (s.ghost_present() && s.ghost == here) {
        fill = s.edible > 0 ? kGhostEdible : kGhost;
      } else if (s.pill && env.layout().pill && here == *env.layout().pill) {
        fill = kPill;
      } else {
        const int fo = env.food_ordinal(here);
        if (fo >= 0 && ((s.food >> fo) & 1)) fill = kFood;
      }
      rect(svg, x0 + cs * c, y0 + cs * r, cs, cs, fill);
    }
}

std::string render_minipac_strips(const MiniPacEnv& env, const StateSpace& space,
                                  const MetaStatePartition& partition,
                                  const StrategicSelection& sel,
                                  const RenderOptions& opt) {
  const Grid& grid = env.grid();
  const double cs = opt.strip_cell_px;
  const double bw = cs * grid.cols();
  const double bh = cs * grid.rows();
  const double gap = cs * 2;
  const int panels = opt.samples_per_strip + 1;
  const bool banner = any_degenerate(sel);
  const double banner_h = banner ? 16.0 : 0.0;
  const double label_w = 70.0;
  const double w = label_w + panels * (bw + gap) + gap;
  const double h = banner_h + sel.sets.size() * (bh + gap) + gap;

  std::vector<std::vector<int>> members(static_cast<std::size_t>(partition.k));
  for (std::size_t i = 0; i < partition.assignment.size(); ++i)
    members[static_cast<std::size_t>(partition.assignment[i])].push_back(
        static_cast<int>(i));

  std::string svg = svg_open(w, h);
  rect(svg, 0, 0, w, h, "#f7f7f7");
  if (banner)
    text(svg, 4, 12, 11,
         "warning: degenerate strategic set (all out-path counts zero)");

  for (std::size_t row = 0; row < sel.sets.size(); ++row) {
    const StrategicSet& set = sel.sets[row];
    const double y = banner_h + gap + row * (bh + gap);
    text(svg, 4, y + bh / 2, 11,
         "cluster " + std::to_string(set.meta_state));
    const int strategic =
        set.states.empty() ? -1 : set.states.front();

    int shown = 0;
    for (int idx : members[static_cast<std::size_t>(set.meta_state)]) {
      if (shown >= opt.samples_per_strip) break;
      if (idx == strategic) continue;
      const double x = label_w + shown * (bw + gap);
      render_minipac_board(svg, env, space.states[static_cast<std::size_t>(idx)], x,
                           y, cs, false);
      ++shown;
    }
    if (strategic >= 0) {
      const double x = label_w + opt.samples_per_strip * (bw + gap);
      render_minipac_board(svg, env,
                           space.states[static_cast<std::size_t>(strategic)], x, y,
                           cs, true);
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

const std::vector<std::string>& meta_state_palette() {
  static const std::vector<std::string> kPalette = {
      "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
      "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080"};
  return kPalette;
}

std::string render_explanation(const Env& env, const StateSpace& space,
                               const MetaStatePartition& partition,
                               const StrategicSelection& selection,
                               const RenderOptions& options) {
  if (static_cast<int>(partition.assignment.size()) != space.size())
    throw RenderError("render: partition does not match the state space");
  if (const auto* fr = dynamic_cast<const FourRoomsEnv*>(&env))
    return render_four_rooms(*fr, space, partition, selection, options);
  if (const auto* mp = dynamic_cast<const MiniPacEnv*>(&env))
    return render_minipac_strips(*mp, space, partition, selection, options);
  throw RenderError("render: unsupported environment type");
}

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<PlotSeries>& series) {
  const double w = 480, h = 320, ml = 56, mr = 16, mt = 32, mb = 44;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::string svg = svg_open(w, h);
  rect(svg, 0, 0, w, h, "#ffffff");
  text(svg, ml, mt - 12, 13, title);
  text(svg, w / 2 - 20, h - 10, 11, x_label);
  text(svg, 4, mt - 12 + 14, 11, y_label);
  svg += "<path d=\"M" + num(ml) + " " + num(mt) + " L" + num(ml) + " " +
         num(h - mb) + " L" + num(w - mr) + " " + num(h - mb) +
         "\" stroke=\"#000000\" fill=\"none\"/>\n";
  text(svg, ml - 4, h - mb + 14, 9, num(xmin));
  text(svg, w - mr - 24, h - mb + 14, 9, num(xmax));
  text(svg, 4, h - mb + 3, 9, num(ymin));
  text(svg, 4, mt + 8, 9, num(ymax));

  const auto& palette = meta_state_palette();
  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    std::string d;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      d += (i == 0 ? "M" : " L") + num(px(s.x[i])) + " " + num(py(s.y[i]));
    svg += "<path d=\"" + d + "\" stroke=\"" + palette[si % palette.size()] +
           "\" stroke-width=\"2\" fill=\"none\"/>\n";
    text(svg, w - mr - 120, mt + 14.0 * (si + 1), 10, s.name);
    rect(svg, w - mr - 136, mt + 14.0 * (si + 1) - 8, 10, 8,
         palette[si % palette.size()]);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace ssx
