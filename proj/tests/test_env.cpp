#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>
#include <set>

#include "core/env.hpp"
#include "core/errors.hpp"

using namespace ssx;

namespace {

// Independent BFS over the wall grid (does not use enumerate_reachable).
int bfs_cell_count(const Grid& grid, Cell start) {
  std::set<std::pair<int, int>> seen{{start.row, start.col}};
  std::queue<Cell> q;
  q.push(start);
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  while (!q.empty()) {
    const Cell p = q.front();
    q.pop();
    for (int i = 0; i < 4; ++i) {
      const Cell t{p.row + dr[i], p.col + dc[i]};
      if (grid.wall(t)) continue;
      if (!seen.insert({t.row, t.col}).second) continue;
      q.push(t);
    }
  }
  return static_cast<int>(seen.size());
}

std::shared_ptr<Env> tiny_eat_env(const std::string& layout) {
  return minipac_env_from_text(layout, RewardScheme::Eat);
}

}  // namespace

TEST_CASE("four rooms 11x11 has four doors and full reachability") {
  auto env = four_rooms_env(11, Cell{0, 10});
  const auto* fr = dynamic_cast<const FourRoomsEnv*>(env.get());
  REQUIRE(fr != nullptr);
  CHECK(fr->doors().size() == 4);
  for (Cell d : fr->doors()) CHECK_FALSE(env->grid().wall(d));

  const int cells = env->grid().non_wall_count();
  CHECK(cells == bfs_cell_count(env->grid(), env->start().agent));

  const StateSpace space = enumerate_reachable(*env, env->start(), 100000);
  CHECK(space.size() == cells);
}

TEST_CASE("four rooms 5x5 matches the hand-enumerated cell list") {
  auto env = four_rooms_env(5, Cell{0, 4});
  // Walls: (1,2),(2,2),(4,2) on the vertical line and (2,1),(2,4) on the
  // horizontal line; doors sit at (0,2),(3,2),(2,0),(2,3).
  const std::set<std::pair<int, int>> walls = {
      {1, 2}, {2, 2}, {4, 2}, {2, 1}, {2, 4}};
  std::set<std::pair<int, int>> expected;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      if (!walls.count({r, c})) expected.insert({r, c});

  const StateSpace space = enumerate_reachable(*env, env->start(), 1000);
  std::set<std::pair<int, int>> got;
  for (const GridState& s : space.states) got.insert({s.agent.row, s.agent.col});
  CHECK(got == expected);
  CHECK(space.size() == 20);
}

TEST_CASE("four rooms rejects a goal on a wall cell") {
  CHECK_THROWS_AS(four_rooms_env(11, Cell{1, 5}), ConfigError);
  CHECK_THROWS_AS(four_rooms_env(4, Cell{0, 0}), ConfigError);
}

TEST_CASE("four rooms stepping bounces off walls and absorbs at the goal") {
  auto env = four_rooms_env(11, Cell{0, 10});
  GridState s;
  s.agent = Cell{10, 0};
  auto out = env->step_distribution(s, 1);  // down, into the border
  REQUIRE(out.size() == 1);
  CHECK(out[0].next.agent == Cell{10, 0});
  CHECK(out[0].prob == doctest::Approx(1.0));

  GridState goal;
  goal.agent = Cell{0, 10};
  for (int a = 0; a < 4; ++a) {
    auto g = env->step_distribution(goal, a);
    REQUIRE(g.size() == 1);
    CHECK(g[0].next == goal);
    CHECK(g[0].reward == 0.0);
  }

  GridState before;
  before.agent = Cell{0, 9};
  auto g = env->step_distribution(before, 3);  // right, onto the goal
  CHECK(g[0].reward == doctest::Approx(1.0));
  CHECK(env->is_goal(g[0].next));
}

TEST_CASE("layout parser handles every cell kind and pads short lines") {
  const Layout layout = parse_layout("####\n#P.o\nG X\n");
  CHECK(layout.grid.rows() == 3);
  CHECK(layout.grid.cols() == 4);
  REQUIRE(layout.agent_start.has_value());
  CHECK(*layout.agent_start == Cell{1, 1});
  REQUIRE(layout.pill.has_value());
  CHECK(*layout.pill == Cell{1, 3});
  REQUIRE(layout.ghost_start.has_value());
  CHECK(*layout.ghost_start == Cell{2, 0});
  REQUIRE(layout.goal.has_value());
  CHECK(*layout.goal == Cell{2, 2});
  CHECK(layout.food_cells.size() == 1);
  CHECK_FALSE(layout.grid.wall(2, 3));  // padded trailing cell is empty, not wall

  CHECK_THROWS_AS(parse_layout("#?#"), ConfigError);
  CHECK_THROWS_AS(parse_layout("oo"), ConfigError);  // two pills
}

TEST_CASE("minipac rejects broken configurations") {
  // Disconnected open region.
  CHECK_THROWS_AS(tiny_eat_env("#####\n"
                               "#P#.#\n"
                               "#####\n"),
                  ConfigError);
  // No agent start.
  CHECK_THROWS_AS(tiny_eat_env("###\n#.#\n###\n"), ConfigError);
}

TEST_CASE("minipac probabilities sum to one and ghost branching stays <= 3") {
  auto env = minipac_env_from_text(default_minipac_layout(), RewardScheme::Eat);
  GridState s = env->start();
  for (int step = 0; step < 6; ++step) {
    for (int a = 0; a < static_cast<int>(env->actions().size()); ++a) {
      const auto out = env->step_distribution(s, a);
      CHECK(out.size() <= 3);
      double total = 0.0;
      for (const Outcome& o : out) {
        CHECK(o.prob >= 0.0);
        total += o.prob;
        env->validate(o.next);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    s = env->step_distribution(s, step % 5)[0].next;
  }
}

TEST_CASE("stepping is a pure function of state and action") {
  auto env = minipac_env_from_text(default_minipac_layout(), RewardScheme::Hunt);
  const GridState s = env->start();
  const auto a = env->step_distribution(s, 2);
  const auto b = env->step_distribution(s, 2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].next == b[i].next);
    CHECK(a[i].prob == b[i].prob);
    CHECK(a[i].reward == b[i].reward);
  }
}

TEST_CASE("ghost reverses when reversal is the only legal move") {
  auto env = minipac_env_from_text(
      "#####\n"
      "#P  #\n"
      "### #\n"
      "### #\n"
      "#####\n",
      RewardScheme::Hunt);
  GridState s = env->start();
  s.ghost = Cell{3, 3};
  s.ghost_dir = Dir::Down;  // just moved into the dead end
  const auto out = env->step_distribution(s, 4);  // agent stays
  REQUIRE(out.size() == 1);
  CHECK(out[0].next.ghost == Cell{2, 3});
  CHECK(out[0].next.ghost_dir == Dir::Up);
}

TEST_CASE("collision with an inedible ghost is an absorbing failure") {
  auto env = tiny_eat_env("######\n"
                          "#P.G.#\n"
                          "######\n");
  GridState s = env->start();
  const auto out = env->step_distribution(s, 3);  // right, onto the food
  REQUIRE(out.size() == 1);
  CHECK(out[0].reward == doctest::Approx(1.0));  // food first, then the ghost hits
  CHECK(env->is_dead(out[0].next));
  const auto frozen = env->step_distribution(out[0].next, 3);
  REQUIRE(frozen.size() == 1);
  CHECK(frozen[0].next == out[0].next);
  CHECK(frozen[0].reward == 0.0);
}

TEST_CASE("hunting an edible ghost scores and ends the episode") {
  auto env = minipac_env_from_text("#####\n"
                                   "#PoG#\n"
                                   "#####\n",
                                   RewardScheme::Hunt);
  GridState s = env->start();
  auto mid = env->step_distribution(s, 3);  // right, onto the pill
  REQUIRE(mid.size() == 1);
  CHECK_FALSE(mid[0].next.pill);
  // The freshly edible ghost is forced onto the agent and is eaten.
  CHECK(mid[0].reward == doctest::Approx(10.0));
  CHECK_FALSE(mid[0].next.ghost_present());
  CHECK(env->is_goal(mid[0].next));
}

TEST_CASE("eating the pill sets the edibility timer on successors") {
  auto env = minipac_env_from_text("#######\n"
                                   "#Po .G#\n"
                                   "#######\n",
                                   RewardScheme::Eat, 8);
  GridState s = env->start();
  auto out = env->step_distribution(s, 3);  // onto the pill
  REQUIRE(!out.empty());
  for (const Outcome& o : out) {
    if (!o.next.ghost_present()) continue;
    CHECK(o.next.edible == 8);
  }
  CHECK(out[0].reward == doctest::Approx(-1.0));  // pill penalty under Eat
}

TEST_CASE("clearing the food ends an Eat episode") {
  auto env = tiny_eat_env("#####\n"
                          "#P.G#\n"
                          "#####\n");
  GridState s = env->start();
  s.ghost = Cell{-1, -1};  // ghost already gone; isolate the food rule
  s.ghost_dir = Dir::None;
  const auto out = env->step_distribution(s, 3);
  REQUIRE(out.size() == 1);
  CHECK(out[0].next.food == 0);
  CHECK(env->is_goal(out[0].next));
}

TEST_CASE("encode/decode round-trips every state near the start") {
  auto env = minipac_env_from_text(default_minipac_layout(), RewardScheme::Eat);
  // Walk a few levels of the reachable set by hand.
  std::vector<GridState> frontier{env->start()};
  std::set<std::string> seen{env->encode(env->start())};
  for (int depth = 0; depth < 3; ++depth) {
    std::vector<GridState> next;
    for (const GridState& s : frontier)
      for (int a = 0; a < 5; ++a)
        for (const Outcome& o : env->step_distribution(s, a)) {
          const std::string enc = env->encode(o.next);
          if (!seen.insert(enc).second) continue;
          next.push_back(o.next);
        }
    frontier = next;
  }
  CHECK(seen.size() > 50);
  for (const std::string& enc : seen) {
    const GridState s = env->decode(enc);
    CHECK(env->encode(s) == enc);
  }

  auto fr = four_rooms_env(11, Cell{0, 10});
  const StateSpace space = enumerate_reachable(*fr, fr->start(), 1000);
  for (const GridState& s : space.states) CHECK(fr->decode(fr->encode(s)) == s);
}

TEST_CASE("enumeration cap raises a truncation error on minipac") {
  auto env = minipac_env_from_text(default_minipac_layout(), RewardScheme::Eat);
  CHECK_THROWS_AS(enumerate_reachable(*env, env->start(), 20000), TruncationError);
}
