#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ssx {

struct Cell {
  int row = 0;
  int col = 0;

  bool operator==(const Cell&) const = default;
};

/// Rectangular wall map. Everything outside the bounds counts as wall.
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols)
      : rows_(rows), cols_(cols),
        wall_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows_ && c >= 0 && c < cols_;
  }
  bool in_bounds(Cell p) const { return in_bounds(p.row, p.col); }

  bool wall(int r, int c) const {
    if (!in_bounds(r, c)) return true;
    return wall_[idx(r, c)] != 0;
  }
  bool wall(Cell p) const { return wall(p.row, p.col); }

  void set_wall(int r, int c, bool w) { wall_[idx(r, c)] = w ? 1 : 0; }

  int cell_index(Cell p) const { return p.row * cols_ + p.col; }
  Cell cell_at(int index) const { return Cell{index / cols_, index % cols_}; }

  int non_wall_count() const;

  /// BFS distances over non-wall cells; -1 for walls and unreachable cells.
  std::vector<int> bfs_distances(Cell from) const;

  /// True when every non-wall cell is reachable from every other.
  bool connected() const;

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> wall_;
};

/// Parsed layout file. Characters: '#' wall, '.' food, 'o' pill, 'P' agent
/// start, 'G' ghost start, 'X' goal marker, ' ' empty. Short lines are padded
/// with empty cells up to the widest line.
struct Layout {
  Grid grid;
  std::vector<Cell> food_cells;  // row-major scan order; bit i of a food mask
  std::optional<Cell> pill;
  std::optional<Cell> agent_start;
  std::optional<Cell> ghost_start;
  std::optional<Cell> goal;
  std::string text;  // canonical text (padded lines, '\n' separated)
};

Layout parse_layout(const std::string& text);

const std::string& default_minipac_layout();

}  // namespace ssx
