#include "core/env.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>

#include "core/errors.hpp"

namespace ssx {

namespace {

constexpr int kDirDr[5] = {0, -1, 1, 0, 0};  // None, Up, Down, Left, Right
constexpr int kDirDc[5] = {0, 0, 0, -1, 1};

Cell moved(Cell c, Dir d) {
  return Cell{c.row + kDirDr[static_cast<int>(d)], c.col + kDirDc[static_cast<int>(d)]};
}

Dir dir_between(Cell from, Cell to) {
  for (int d = 1; d <= 4; ++d)
    if (to.row - from.row == kDirDr[d] && to.col - from.col == kDirDc[d])
      return static_cast<Dir>(d);
  return Dir::None;
}

char dir_char(Dir d) {
  switch (d) {
    case Dir::Up: return 'U';
    case Dir::Down: return 'D';
    case Dir::Left: return 'L';
    case Dir::Right: return 'R';
    default: return '-';
  }
}

Dir dir_from_char(char c) {
  switch (c) {
    case 'U': return Dir::Up;
    case 'D': return Dir::Down;
    case 'L': return Dir::Left;
    case 'R': return Dir::Right;
    case '-': return Dir::None;
    default: throw ConfigError(std::string("decode: bad direction '") + c + "'");
  }
}

std::uint64_t full_food_mask(int n) {
  if (n <= 0) return 0;
  if (n >= 64) return ~std::uint64_t{0};
  return (std::uint64_t{1} << n) - 1;
}

}  // namespace

std::string scheme_name(RewardScheme s) {
  switch (s) {
    case RewardScheme::FourRoomsGoal: return "four_rooms_goal";
    case RewardScheme::Eat: return "eat";
    case RewardScheme::Hunt: return "hunt";
  }
  return "?";
}

RewardScheme scheme_from_name(const std::string& name) {
  if (name == "four_rooms_goal") return RewardScheme::FourRoomsGoal;
  if (name == "eat") return RewardScheme::Eat;
  if (name == "hunt") return RewardScheme::Hunt;
  throw ConfigError("unknown reward scheme: " + name);
}

// ---------------------------------------------------------------------------
// FourRoomsEnv

FourRoomsEnv::FourRoomsEnv(int grid_size, Cell goal) : size_(grid_size), goal_(goal) {
  if (grid_size < 5) throw ConfigError("four_rooms: grid_size must be >= 5");
  grid_ = Grid(grid_size, grid_size);
  const int wl = grid_size / 2;

  // One door at the midpoint of each of the four interior wall segments.
  const int seg_a_mid = (0 + (wl - 1)) / 2;
  const int seg_b_mid = ((wl + 1) + (grid_size - 1)) / 2;
  for (int r = 0; r < grid_size; ++r)
    if (r != seg_a_mid && r != seg_b_mid) grid_.set_wall(r, wl, true);
  for (int c = 0; c < grid_size; ++c)
    if (c != seg_a_mid && c != seg_b_mid) grid_.set_wall(wl, c, true);
  doors_ = {Cell{seg_a_mid, wl}, Cell{seg_b_mid, wl}, Cell{wl, seg_a_mid},
            Cell{wl, seg_b_mid}};

  if (grid_.wall(goal_)) throw ConfigError("four_rooms: goal is on a wall cell");
  actions_ = {{"up", -1, 0}, {"down", 1, 0}, {"left", 0, -1}, {"right", 0, 1}};
}

GridState FourRoomsEnv::start() const {
  GridState s;
  s.agent = Cell{size_ - 1, 0};  // lower-left corner
  return s;
}

std::vector<Outcome> FourRoomsEnv::step_distribution(const GridState& s,
                                                     int action) const {
  validate(s);
  if (action < 0 || action >= static_cast<int>(actions_.size()))
    throw IndexError("four_rooms: bad action index");
  if (is_goal(s)) return {{s, 1.0, 0.0}};
  const Action& a = actions_[static_cast<std::size_t>(action)];
  Cell tgt{s.agent.row + a.dr, s.agent.col + a.dc};
  if (grid_.wall(tgt)) tgt = s.agent;  // bounce off walls, stay in place
  GridState ns = s;
  ns.agent = tgt;
  const double reward = (tgt == goal_) ? 1.0 : 0.0;
  return {{ns, 1.0, reward}};
}

StateKey FourRoomsEnv::key(const GridState& s) const {
  StateKey k;
  k.hi = (static_cast<std::uint64_t>(grid_.cell_index(s.agent)) + 1) << 40;
  return k;
}

std::string FourRoomsEnv::encode(const GridState& s) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "a:%d,%d", s.agent.row, s.agent.col);
  return buf;
}

GridState FourRoomsEnv::decode(const std::string& text) const {
  GridState s;
  if (std::sscanf(text.c_str(), "a:%d,%d", &s.agent.row, &s.agent.col) != 2)
    throw ConfigError("four_rooms decode: bad state string: " + text);
  validate(s);
  return s;
}

std::string FourRoomsEnv::layout_text() const {
  std::string out;
  for (int r = 0; r < size_; ++r) {
    for (int c = 0; c < size_; ++c) {
      if (grid_.wall(r, c))
        out += '#';
      else if (Cell{r, c} == goal_)
        out += 'X';
      else
        out += ' ';
    }
    out += '\n';
  }
  return out;
}

void FourRoomsEnv::validate(const GridState& s) const {
  if (grid_.wall(s.agent)) throw IndexError("four_rooms: agent on wall cell");
}

int FourRoomsEnv::room_of(Cell c) const {
  const int wl = size_ / 2;
  if (!grid_.in_bounds(c) || grid_.wall(c)) return -1;
  if (c.row == wl || c.col == wl) return -1;  // door cells
  const int top = c.row < wl ? 0 : 1;
  const int left = c.col < wl ? 0 : 1;
  return top == 0 ? (left == 0 ? 0 : 1) : (left == 0 ? 2 : 3);
}

// ---------------------------------------------------------------------------
// MiniPacEnv

MiniPacEnv::MiniPacEnv(Layout layout, RewardScheme scheme, int pill_duration)
    : layout_(std::move(layout)), scheme_(scheme), pill_duration_(pill_duration) {
  if (scheme_ == RewardScheme::FourRoomsGoal)
    throw ConfigError("minipac: scheme must be eat or hunt");
  if (!layout_.agent_start) throw ConfigError("minipac: layout has no agent start (P)");
  if (!layout_.grid.connected()) throw ConfigError("minipac: disconnected layout");
  if (layout_.food_cells.size() > 64)
    throw ConfigError("minipac: more than 64 food cells not supported");
  if (pill_duration_ < 1 || pill_duration_ > 200)
    throw ConfigError("minipac: pill_duration out of range [1,200]");
  if (layout_.ghost_start && *layout_.ghost_start == *layout_.agent_start)
    throw ConfigError("minipac: agent and ghost start on the same cell");

  actions_ = {{"up", -1, 0}, {"down", 1, 0}, {"left", 0, -1}, {"right", 0, 1},
              {"stay", 0, 0}};
  food_ordinal_.assign(
      static_cast<std::size_t>(layout_.grid.rows() * layout_.grid.cols()), -1);
  for (std::size_t i = 0; i < layout_.food_cells.size(); ++i)
    food_ordinal_[static_cast<std::size_t>(
        layout_.grid.cell_index(layout_.food_cells[i]))] = static_cast<int>(i);
}

int MiniPacEnv::food_ordinal(Cell c) const {
  if (!layout_.grid.in_bounds(c)) return -1;
  return food_ordinal_[static_cast<std::size_t>(layout_.grid.cell_index(c))];
}

Dir MiniPacEnv::initial_ghost_dir(Cell ghost) const {
  for (int d = 1; d <= 4; ++d)
    if (!layout_.grid.wall(moved(ghost, static_cast<Dir>(d))))
      return static_cast<Dir>(d);
  return Dir::None;
}

GridState MiniPacEnv::start() const {
  GridState s;
  s.agent = *layout_.agent_start;
  if (layout_.ghost_start) {
    s.ghost = *layout_.ghost_start;
    s.ghost_dir = initial_ghost_dir(s.ghost);
  }
  s.food = full_food_mask(food_count());
  s.pill = layout_.pill.has_value();
  return s;
}

std::vector<Cell> MiniPacEnv::ghost_moves(Cell ghost, Dir last_dir) const {
  std::vector<Cell> legal;
  for (int d = 1; d <= 4; ++d) {
    const Cell t = moved(ghost, static_cast<Dir>(d));
    if (!layout_.grid.wall(t)) legal.push_back(t);
  }
  if (legal.empty()) return legal;
  const Cell came_from = moved(ghost, reverse(last_dir));
  std::vector<Cell> forward;
  for (Cell t : legal)
    if (!(last_dir != Dir::None && t == came_from)) forward.push_back(t);
  return forward.empty() ? legal : forward;  // reversal only when forced
}

bool MiniPacEnv::is_goal(const GridState& s) const {
  if (is_dead(s)) return false;
  if (scheme_ == RewardScheme::Hunt) return !s.ghost_present();
  return s.food == 0;  // Eat: board cleared
}

std::vector<Outcome> MiniPacEnv::step_distribution(const GridState& s,
                                                   int action) const {
  validate(s);
  if (action < 0 || action >= static_cast<int>(actions_.size()))
    throw IndexError("minipac: bad action index");
  if (is_terminal(s)) return {{s, 1.0, 0.0}};

  const bool eat = scheme_ == RewardScheme::Eat;
  const bool hunt = scheme_ == RewardScheme::Hunt;
  GridState ns = s;
  double reward = 0.0;

  // Agent phase.
  const Action& a = actions_[static_cast<std::size_t>(action)];
  Cell tgt{s.agent.row + a.dr, s.agent.col + a.dc};
  if (layout_.grid.wall(tgt)) tgt = s.agent;
  ns.agent = tgt;
  if (ns.ghost_present() && ns.ghost == tgt) {
    if (s.edible > 0) {
      ns.ghost = Cell{-1, -1};
      ns.ghost_dir = Dir::None;
      ns.edible = 0;
      if (hunt) reward += 10.0;
    } else {
      ns.edible = 0;  // caught by the ghost; absorbing failure
      return {{ns, 1.0, reward}};
    }
  }
  const int fo = food_ordinal(tgt);
  if (fo >= 0 && ((ns.food >> fo) & 1)) {
    ns.food &= ~(std::uint64_t{1} << fo);
    if (eat) reward += 1.0;
  }
  bool ate_pill = false;
  if (ns.pill && layout_.pill && tgt == *layout_.pill) {
    ns.pill = false;
    ate_pill = true;
    if (eat) reward += -1.0;
  }

  const bool ghost_edible_now = ate_pill || s.edible > 0;
  const std::uint8_t next_edible =
      ate_pill ? static_cast<std::uint8_t>(pill_duration_)
               : (s.edible > 0 ? static_cast<std::uint8_t>(s.edible - 1)
                               : std::uint8_t{0});

  if (!ns.ghost_present()) {
    ns.edible = 0;
    return {{ns, 1.0, reward}};
  }
  if (is_goal(ns)) {  // Eat: last food just eaten; episode ends before ghost moves
    ns.edible = 0;
    return {{ns, 1.0, reward}};
  }

  // Ghost phase: uniform over legal moves, no reversal unless forced.
  const std::vector<Cell> moves = ghost_moves(ns.ghost, s.ghost_dir);
  if (moves.empty()) {
    GridState gs = ns;
    gs.edible = next_edible;
    return {{gs, 1.0, reward}};
  }
  const double p = 1.0 / static_cast<double>(moves.size());
  std::vector<Outcome> out;
  out.reserve(moves.size());
  for (Cell m : moves) {
    GridState gs = ns;
    gs.ghost = m;
    gs.ghost_dir = dir_between(ns.ghost, m);
    gs.edible = next_edible;
    double r2 = reward;
    if (m == gs.agent) {
      if (ghost_edible_now) {
        gs.ghost = Cell{-1, -1};
        gs.ghost_dir = Dir::None;
        gs.edible = 0;
        if (hunt) r2 += 10.0;
      } else {
        gs.edible = 0;
      }
    }
    out.push_back({gs, p, r2, 2});  // agent moved, then the ghost moved
  }
  return out;
}

StateKey MiniPacEnv::key(const GridState& s) const {
  StateKey k;
  k.lo = s.food;
  const std::uint64_t agent = static_cast<std::uint64_t>(layout_.grid.cell_index(s.agent)) + 1;
  const std::uint64_t ghost =
      s.ghost_present()
          ? static_cast<std::uint64_t>(layout_.grid.cell_index(s.ghost)) + 1
          : 0;
  k.hi = (agent << 40) | (ghost << 24) |
         (static_cast<std::uint64_t>(s.ghost_dir) << 16) |
         (static_cast<std::uint64_t>(s.pill ? 1 : 0) << 8) |
         static_cast<std::uint64_t>(s.edible);
  return k;
}

std::string MiniPacEnv::encode(const GridState& s) const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "a:%d,%d|g:%d,%d|d:%c|p:%d|t:%d|f:%016llx",
                s.agent.row, s.agent.col, s.ghost.row, s.ghost.col,
                dir_char(s.ghost_dir), s.pill ? 1 : 0,
                static_cast<int>(s.edible),
                static_cast<unsigned long long>(s.food));
  return buf;
}

GridState MiniPacEnv::decode(const std::string& text) const {
  GridState s;
  char dc = '-';
  int pill = 0;
  int edible = 0;
  unsigned long long food = 0;
  if (std::sscanf(text.c_str(), "a:%d,%d|g:%d,%d|d:%c|p:%d|t:%d|f:%llx",
                  &s.agent.row, &s.agent.col, &s.ghost.row, &s.ghost.col, &dc,
                  &pill, &edible, &food) != 8)
    throw ConfigError("minipac decode: bad state string: " + text);
  s.ghost_dir = dir_from_char(dc);
  s.pill = pill != 0;
  if (edible < 0 || edible > 255)
    throw ConfigError("minipac decode: edible timer out of range");
  s.edible = static_cast<std::uint8_t>(edible);
  s.food = food;
  validate(s);
  return s;
}

void MiniPacEnv::validate(const GridState& s) const {
  if (layout_.grid.wall(s.agent)) throw IndexError("minipac: agent on wall cell");
  if (s.ghost_present() && layout_.grid.wall(s.ghost))
    throw IndexError("minipac: ghost on wall cell");
  if (!s.ghost_present() && (s.ghost_dir != Dir::None || s.edible != 0))
    throw IndexError("minipac: absent ghost must have no direction/timer");
  if (food_count() < 64 && (s.food >> food_count()) != 0)
    throw IndexError("minipac: food mask has bits beyond the layout's food cells");
  if (s.pill && !layout_.pill) throw IndexError("minipac: pill set but layout has none");
}

std::shared_ptr<Env> four_rooms_env(int grid_size, Cell goal) {
  return std::make_shared<FourRoomsEnv>(grid_size, goal);
}

std::shared_ptr<Env> minipac_env(const Layout& layout, RewardScheme scheme,
                                 int pill_duration) {
  return std::make_shared<MiniPacEnv>(layout, scheme, pill_duration);
}

std::shared_ptr<Env> minipac_env_from_text(const std::string& layout_text,
                                           RewardScheme scheme, int pill_duration) {
  return minipac_env(parse_layout(layout_text), scheme, pill_duration);
}

// ---------------------------------------------------------------------------

StateSpace enumerate_reachable(const Env& env, const GridState& start,
                               int max_states) {
  env.validate(start);
  StateSpace space;
  space.index.emplace(env.key(start), 0);
  space.states.push_back(start);
  std::size_t head = 0;
  while (head < space.states.size()) {
    const GridState s = space.states[head++];
    for (int a = 0; a < static_cast<int>(env.actions().size()); ++a) {
      for (const Outcome& o : env.step_distribution(s, a)) {
        if (o.prob <= 0.0) continue;
        const StateKey k = env.key(o.next);
        if (space.index.contains(k)) continue;
        if (space.size() >= max_states)
          throw TruncationError("enumerate_reachable: state cap " +
                                std::to_string(max_states) +
                                " exceeded; use a local approximation");
        space.index.emplace(k, space.size());
        space.states.push_back(o.next);
      }
    }
  }
  space.boundary.assign(space.states.size(), 0);
  space.root = 0;
  return space;
}

}  // namespace ssx
