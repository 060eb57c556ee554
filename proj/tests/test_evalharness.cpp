#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/evalharness.hpp"

using namespace ssx;

namespace {

// Small board so local runs stay fast.
const char* kSmallBoard =
    "#######\n"
    "#P....#\n"
    "#.##..#\n"
    "#..o..#\n"
    "#....G#\n"
    "#######\n";

SsxParams small_params() {
  SsxParams p;
  p.k = 3;
  p.eta = 1.0;
  p.lambda = 0.1;
  p.eps_g = 0.1;
  p.horizon = 3;
  p.restarts = 3;
  p.seed = 11;
  return p;
}

}  // namespace

TEST_CASE("spearman rank correlation") {
  CHECK(spearman({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {9, 7, 5, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3, 4}, {1, 1, 2, 2}) > 0.0);  // average ranks on ties
  CHECK_THROWS_AS(spearman({1.0}, {1.0}), DimensionError);
}

TEST_CASE("entity distances") {
  GridState a, b;
  a.agent = Cell{1, 1};
  b.agent = Cell{4, 5};
  CHECK(agent_distance(a, b) == doctest::Approx(5.0));
  a.food = 0b0111;
  b.food = 0b1110;
  CHECK(food_distance(a, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK(food_distance(a, a) == 0.0);
}

TEST_CASE("study roots are non-terminal and deduplicated") {
  auto env = minipac_env_from_text(kSmallBoard, RewardScheme::Hunt);
  auto policy = scripted_minipac_policy(env, RewardScheme::Hunt, 0.3);
  const auto roots = study_roots(env, *policy, 4, 12, 3);
  CHECK(!roots.empty());
  CHECK(roots.size() <= 4);
  for (const auto& r : roots) CHECK_FALSE(env->is_terminal(r));
}

TEST_CASE("random boards respect the ghost distance floor") {
  auto env = minipac_env_from_text(kSmallBoard, RewardScheme::Eat);
  const auto* mp = dynamic_cast<const MiniPacEnv*>(env.get());
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const GridState s = random_minipac_board(*mp, rng, 3, true, 0);
    const auto dist = env->grid().bfs_distances(s.agent);
    CHECK(dist[static_cast<std::size_t>(env->grid().cell_index(s.ghost))] >= 3);
    env->validate(s);
    CHECK(s.pill);
  }
}

TEST_CASE("sampling study at fraction 1 has zero displacement") {
  auto env = minipac_env_from_text(kSmallBoard, RewardScheme::Hunt);
  auto policy = scripted_minipac_policy(env, RewardScheme::Hunt, 0.3);
  const auto roots = study_roots(env, *policy, 1, 6, 3);
  const auto rows = sampling_study(env, *policy, roots, {1.0}, small_params());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mean_displacement == doctest::Approx(0.0));
}

TEST_CASE("horizon tables have zero diagonals and full pair coverage") {
  auto env = minipac_env_from_text(kSmallBoard, RewardScheme::Hunt);
  auto policy = scripted_minipac_policy(env, RewardScheme::Hunt, 0.3);
  const auto roots = study_roots(env, *policy, 1, 6, 3);
  const HorizonTables t =
      horizon_faithfulness(env, *policy, roots, {2, 3, 4}, small_params());
  REQUIRE(t.n_values.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(t.agent[static_cast<std::size_t>(t.cell_index(i, i))] == 0.0);
    CHECK(t.ghost[static_cast<std::size_t>(t.cell_index(i, i))] == 0.0);
    CHECK(t.food[static_cast<std::size_t>(t.cell_index(i, i))] == 0.0);
  }
  CHECK(t.pairs() == 6);
  CHECK_THROWS_AS(
      horizon_faithfulness(env, *policy, roots, {3, 2}, small_params()),
      ConfigError);
}

TEST_CASE("identity perturbation gives zero distances") {
  auto env = minipac_env_from_text(kSmallBoard, RewardScheme::Hunt);
  auto policy = scripted_minipac_policy(env, RewardScheme::Hunt, 0.3);
  const auto roots = study_roots(env, *policy, 1, 6, 3);
  const StabilityReport r =
      perturbation_stability(env, *policy, roots, 3, 0, 17, small_params());
  CHECK(r.trials == 3);
  CHECK(r.agent == doctest::Approx(0.0));
  CHECK(r.ghost == doctest::Approx(0.0));
  CHECK(r.food == doctest::Approx(0.0));
}

TEST_CASE("growth saturates on four rooms and bounds minipac branching") {
  auto fr = four_rooms_env(9, Cell{0, 8});
  const auto rows = growth_study(fr, 30, 10, 7);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0].n == 0);
  CHECK(rows[0].mean_states == doctest::Approx(1.0));
  CHECK(rows.back().mean_states == doctest::Approx(fr->grid().non_wall_count()));
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].mean_states + 1e-12 >= rows[i - 1].mean_states);

  auto mp = minipac_env_from_text(kSmallBoard, RewardScheme::Eat);
  const auto mrows = growth_study(mp, 4, 10, 7);
  for (const auto& row : mrows)
    if (row.n >= 2) CHECK(row.mean_states < std::pow(5.0, row.n));
}

TEST_CASE("four rooms k sweep knees at four meta-states") {
  auto env = four_rooms_env(11, Cell{0, 10});
  const ValueIterationResult vi = value_iteration(env, 0.95, 1e-8, 10000, 0.1);
  SsxParams p;
  p.k = 4;
  p.eta = 1.0;
  p.lambda = 50.0;
  p.horizon = 0;
  p.restarts = 5;
  p.seed = 1;
  p.weighted_counts = true;
  const auto rows = k_sweep(env, *vi.policy, env->start(), {2, 3, 4, 5, 6}, p);
  REQUIRE(rows.size() == 5);
  int knee = -1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double dd =
        rows[i - 1].objective - 2.0 * rows[i].objective + rows[i + 1].objective;
    if (dd > best) {
      best = dd;
      knee = rows[i].k;
    }
  }
  CHECK(knee == 4);
}

TEST_CASE("studies are seed-deterministic") {
  auto env = minipac_env_from_text(kSmallBoard, RewardScheme::Hunt);
  auto policy = scripted_minipac_policy(env, RewardScheme::Hunt, 0.3);
  const auto roots = study_roots(env, *policy, 1, 6, 3);
  SsxParams p = small_params();
  p.sample_fraction = 0.5;

  const auto a = sampling_study(env, *policy, roots, {0.5}, p);
  const auto b = sampling_study(env, *policy, roots, {0.5}, p);
  REQUIRE(a.size() == b.size());
  CHECK(a[0].mean_displacement == b[0].mean_displacement);

  const auto ra = perturbation_stability(env, *policy, roots, 2, 2, 9, p);
  const auto rb = perturbation_stability(env, *policy, roots, 2, 2, 9, p);
  CHECK(ra.agent == rb.agent);
  CHECK(ra.ghost == rb.ghost);
  CHECK(ra.food == rb.food);

  const auto ga = growth_study(env, 3, 5, 4);
  const auto gb = growth_study(env, 3, 5, 4);
  REQUIRE(ga.size() == gb.size());
  for (std::size_t i = 0; i < ga.size(); ++i)
    CHECK(ga[i].mean_states == gb[i].mean_states);
}

TEST_CASE("k sweep reports objectives for feasible k only") {
  auto env = minipac_env_from_text(kSmallBoard, RewardScheme::Hunt);
  auto policy = scripted_minipac_policy(env, RewardScheme::Hunt, 0.3);
  SsxParams p = small_params();
  const auto rows = k_sweep(env, *policy, env->start(), {2, 3, 4}, p);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK(std::isfinite(row.objective));
  CHECK_THROWS_AS(k_sweep(env, *policy, env->start(), {3, 2}, p), ConfigError);
}
