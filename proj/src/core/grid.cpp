#include "core/grid.hpp"

#include <queue>

#include "core/errors.hpp"

namespace ssx {

int Grid::non_wall_count() const {
  int n = 0;
  for (std::uint8_t w : wall_) n += (w == 0);
  return n;
}

std::vector<int> Grid::bfs_distances(Cell from) const {
  std::vector<int> dist(wall_.size(), -1);
  if (!in_bounds(from) || wall(from)) return dist;
  std::queue<Cell> q;
  dist[idx(from.row, from.col)] = 0;
  q.push(from);
  static constexpr int kDr[4] = {-1, 1, 0, 0};
  static constexpr int kDc[4] = {0, 0, -1, 1};
  while (!q.empty()) {
    const Cell p = q.front();
    q.pop();
    const int d = dist[idx(p.row, p.col)];
    for (int i = 0; i < 4; ++i) {
      const int r = p.row + kDr[i];
      const int c = p.col + kDc[i];
      if (wall(r, c)) continue;
      if (dist[idx(r, c)] >= 0) continue;
      dist[idx(r, c)] = d + 1;
      q.push(Cell{r, c});
    }
  }
  return dist;
}

bool Grid::connected() const {
  Cell first{-1, -1};
  for (int r = 0; r < rows_ && first.row < 0; ++r)
    for (int c = 0; c < cols_; ++c)
      if (!wall(r, c)) {
        first = Cell{r, c};
        break;
      }
  if (first.row < 0) return false;  // no non-wall cells at all
  const std::vector<int> dist = bfs_distances(first);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (!wall(r, c) && dist[idx(r, c)] < 0) return false;
  return true;
}

Layout parse_layout(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ConfigError("layout: empty text");

  std::size_t cols = 0;
  for (const auto& l : lines) cols = std::max(cols, l.size());
  if (cols == 0) throw ConfigError("layout: no columns");

  Layout out;
  out.grid = Grid(static_cast<int>(lines.size()), static_cast<int>(cols));
  int pill_count = 0;
  for (int r = 0; r < out.grid.rows(); ++r) {
    std::string line = lines[static_cast<std::size_t>(r)];
    line.resize(cols, ' ');  // trailing whitespace == empty cells
    for (int c = 0; c < out.grid.cols(); ++c) {
      const char ch = line[static_cast<std::size_t>(c)];
      const Cell here{r, c};
      switch (ch) {
        case '#':
          out.grid.set_wall(r, c, true);
          break;
        case '.':
          out.food_cells.push_back(here);
          break;
        case 'o':
          ++pill_count;
          out.pill = here;
          break;
        case 'P':
          if (out.agent_start) throw ConfigError("layout: multiple agent starts");
          out.agent_start = here;
          break;
        case 'G':
          if (out.ghost_start) throw ConfigError("layout: multiple ghost starts");
          out.ghost_start = here;
          break;
        case 'X':
          out.goal = here;
          break;
        case ' ':
          break;
        default:
          throw ConfigError(std::string("layout: unknown cell character '") + ch + "'");
      }
    }
    out.text += line;
    out.text += '\n';
  }
  if (pill_count > 1) throw ConfigError("layout: more than one pill cell");
  return out;
}

const std::string& default_minipac_layout() {
  static const std::string kLayout =
      "#######\n"
      "#P....#\n"
      "#.##..#\n"
      "#..o..#\n"
      "#.#.#.#\n"
      "#.....#\n"
      "#.##..#\n"
      "#..#..#\n"
      "#....G#\n"
      "#######\n";
  return kLayout;
}

}  // namespace ssx
