#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/grid.hpp"
#include "core/state.hpp"

namespace ssx {

enum class RewardScheme { FourRoomsGoal, Eat, Hunt };

std::string scheme_name(RewardScheme s);
RewardScheme scheme_from_name(const std::string& name);

struct Action {
  std::string name;
  int dr = 0;
  int dc = 0;
};

struct Outcome {
  GridState next;
  double prob = 0.0;
  double reward = 0.0;
  int moves = 1;  // entity movements in this outcome (agent +1, ghost +1)
};

/// A discrete environment with deterministic agent moves and (for MiniPac) a
/// stochastic ghost response folded into step_distribution. Immutable after
/// construction; all member functions are pure.
class Env {
 public:
  virtual ~Env() = default;

  virtual const Grid& grid() const = 0;
  virtual const std::vector<Action>& actions() const = 0;
  virtual RewardScheme scheme() const = 0;
  virtual GridState start() const = 0;

  /// All (next state, probability, reward) outcomes of taking `action` in
  /// `state`. Probabilities sum to 1. Terminal states self-loop with reward 0.
  virtual std::vector<Outcome> step_distribution(const GridState& state,
                                                 int action) const = 0;

  virtual bool is_goal(const GridState& state) const = 0;
  virtual bool is_dead(const GridState& state) const = 0;
  bool is_terminal(const GridState& s) const { return is_goal(s) || is_dead(s); }

  virtual StateKey key(const GridState& state) const = 0;
  virtual std::string encode(const GridState& state) const = 0;
  virtual GridState decode(const std::string& text) const = 0;

  /// Canonical layout text, hashed into explanation artifacts.
  virtual std::string layout_text() const = 0;

  virtual void validate(const GridState& state) const = 0;
};

class FourRoomsEnv : public Env {
 public:
  FourRoomsEnv(int grid_size, Cell goal);

  const Grid& grid() const override { return grid_; }
  const std::vector<Action>& actions() const override { return actions_; }
  RewardScheme scheme() const override { return RewardScheme::FourRoomsGoal; }
  GridState start() const override;
  std::vector<Outcome> step_distribution(const GridState&, int) const override;
  bool is_goal(const GridState& s) const override { return s.agent == goal_; }
  bool is_dead(const GridState&) const override { return false; }
  StateKey key(const GridState&) const override;
  std::string encode(const GridState&) const override;
  GridState decode(const std::string&) const override;
  std::string layout_text() const override;
  void validate(const GridState&) const override;

  Cell goal() const { return goal_; }
  const std::vector<Cell>& doors() const { return doors_; }
  /// Room quadrant of a cell: 0 top-left, 1 top-right, 2 bottom-left,
  /// 3 bottom-right; -1 for walls and door cells (which sit on the wall lines).
  int room_of(Cell c) const;

 private:
  int size_;
  Grid grid_;
  Cell goal_;
  std::vector<Cell> doors_;
  std::vector<Action> actions_;
};

class MiniPacEnv : public Env {
 public:
  MiniPacEnv(Layout layout, RewardScheme scheme, int pill_duration = 8);

  const Grid& grid() const override { return layout_.grid; }
  const std::vector<Action>& actions() const override { return actions_; }
  RewardScheme scheme() const override { return scheme_; }
  GridState start() const override;
  std::vector<Outcome> step_distribution(const GridState&, int) const override;
  bool is_goal(const GridState&) const override;
  bool is_dead(const GridState& s) const override {
    return s.ghost_present() && s.ghost == s.agent && s.edible == 0;
  }
  StateKey key(const GridState&) const override;
  std::string encode(const GridState&) const override;
  GridState decode(const std::string&) const override;
  std::string layout_text() const override { return layout_.text; }
  void validate(const GridState&) const override;

  const Layout& layout() const { return layout_; }
  int pill_duration() const { return pill_duration_; }
  int food_count() const { return static_cast<int>(layout_.food_cells.size()); }
  /// Index into the food mask for a cell, or -1 if the cell never holds food.
  int food_ordinal(Cell c) const;
  Dir initial_ghost_dir(Cell ghost) const;

 private:
  std::vector<Cell> ghost_moves(Cell ghost, Dir last_dir) const;

  Layout layout_;
  RewardScheme scheme_;
  int pill_duration_;
  std::vector<Action> actions_;
  std::vector<int> food_ordinal_;  // per cell index, -1 when not a food cell
};

std::shared_ptr<Env> four_rooms_env(int grid_size, Cell goal);
std::shared_ptr<Env> minipac_env(const Layout& layout, RewardScheme scheme,
                                 int pill_duration = 8);
std::shared_ptr<Env> minipac_env_from_text(const std::string& layout_text,
                                           RewardScheme scheme,
                                           int pill_duration = 8);

/// Enumerated state set with a dense index. Also used for local
/// approximations, where `boundary[i]` marks states whose expansion was cut
/// by the horizon (they become absorbing in induced transition models).
struct StateSpace {
  std::vector<GridState> states;
  std::unordered_map<StateKey, int, StateKeyHash> index;
  std::vector<std::uint8_t> boundary;
  int root = 0;
  int horizon = 0;
  bool local = false;

  int size() const { return static_cast<int>(states.size()); }
  int find(const Env& env, const GridState& s) const {
    auto it = index.find(env.key(s));
    return it == index.end() ? -1 : it->second;
  }
};

/// BFS closure of `start` under all (action, outcome) pairs, deterministic
/// order. Throws TruncationError when the closure exceeds `max_states`.
StateSpace enumerate_reachable(const Env& env, const GridState& start,
                               int max_states);

}  // namespace ssx
