#include "core/evalharness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace ssx {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double g_timing_sink = 0.0;  // keeps the timed computations observable

/// Wall-clock time of one C(s,Phi) computation: calibrated batch size so a
/// measurement spans at least ~20ms, best of three batches.
double time_counts(const PathMatrix& pm, const std::vector<int>& assignment, int k,
                   double fraction, std::uint64_t seed, bool weighted) {
  const double t0 = now_seconds();
  g_timing_sink += out_path_counts(pm, assignment, k, fraction, seed, weighted).c[0];
  const double once = std::max(now_seconds() - t0, 1e-7);
  const int reps = std::max(1, static_cast<int>(0.02 / once));
  double best = std::numeric_limits<double>::infinity();
  for (int batch = 0; batch < 3; ++batch) {
    const double t1 = now_seconds();
    for (int r = 0; r < reps; ++r)
      g_timing_sink +=
          out_path_counts(pm, assignment, k, fraction, seed, weighted).c[0];
    best = std::min(best, (now_seconds() - t1) / reps);
  }
  return best;
}

std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double agent_distance(const GridState& a, const GridState& b) {
  const double dr = a.agent.row - b.agent.row;
  const double dc = a.agent.col - b.agent.col;
  return std::sqrt(dr * dr + dc * dc);
}

double food_distance(const GridState& a, const GridState& b) {
  return std::sqrt(static_cast<double>(std::popcount(a.food ^ b.food)));
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DimensionError("spearman: need two equal-length series");
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<GridState> study_roots(const std::shared_ptr<Env>& env,
                                   const Policy& policy, int count,
                                   int rollout_steps, std::uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x40075ULL));
  std::vector<GridState> candidates{env->start()};
  const std::vector<GridState> traj =
      rollout(*env, policy, env->start(), rollout_steps, rng);
  candidates.insert(candidates.end(), traj.begin(), traj.end());

  std::vector<GridState> unique;
  std::vector<StateKey> seen;
  for (const GridState& s : candidates) {
    if (env->is_terminal(s)) continue;
    const StateKey k = env->key(s);
    if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
    seen.push_back(k);
    unique.push_back(s);
  }
  if (unique.empty()) unique.push_back(env->start());

  std::vector<GridState> roots;
  const int m = static_cast<int>(unique.size());
  const int take = std::min(count, m);
  for (int j = 0; j < take; ++j)
    roots.push_back(unique[static_cast<std::size_t>(j * m / take)]);
  return roots;
}

GridState random_minipac_board(const MiniPacEnv& env, Rng& rng, int min_ghost_dist,
                               bool pill_present, int edible) {
  const Grid& grid = env.grid();
  std::vector<Cell> open;
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      if (!grid.wall(r, c)) open.push_back(Cell{r, c});
  if (open.size() < 2) throw ConfigError("random board: not enough open cells");

  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Cell agent = open[static_cast<std::size_t>(rng.below(open.size()))];
    const Cell ghost = open[static_cast<std::size_t>(rng.below(open.size()))];
    if (agent == ghost) continue;
    const std::vector<int> dist = grid.bfs_distances(agent);
    const int d = dist[static_cast<std::size_t>(grid.cell_index(ghost))];
    if (d < min_ghost_dist) continue;

    GridState s;
    s.agent = agent;
    s.ghost = ghost;
    s.ghost_dir = env.initial_ghost_dir(ghost);
    s.pill = pill_present && env.layout().pill.has_value();
    s.edible = static_cast<std::uint8_t>(edible);
    std::uint64_t food = 0;
    for (int i = 0; i < env.food_count(); ++i) {
      const Cell fc = env.layout().food_cells[static_cast<std::size_t>(i)];
      if (fc == agent || fc == ghost) continue;  // no food under the actors
      food |= std::uint64_t{1} << i;
    }
    s.food = food;
    if (env.is_terminal(s)) continue;
    return s;
  }
  throw ConfigError("random board: could not satisfy the ghost-distance constraint");
}

std::vector<SamplingRow> sampling_study(const std::shared_ptr<Env>& env,
                                        const Policy& policy,
                                        const std::vector<GridState>& roots,
                                        const std::vector<double>& fractions,
                                        const SsxParams& params) {
  for (double f : fractions)
    if (!(f > 0.0) || f > 1.0)
      throw ConfigError("sampling_study: fractions must lie in (0,1]");

  struct ExactRun {
    GridState priority;
    PathMatrix pm;
    std::vector<int> assignment;
    int k = 0;
    double exact_time = 0.0;
  };
  std::vector<ExactRun> exact;
  exact.reserve(roots.size());
  SsxParams exact_params = params;
  exact_params.sample_fraction = 1.0;
  for (const GridState& root : roots) {
    SsxOutcome out = run_ssx(env, policy, root, exact_params);
    ExactRun er;
    er.priority = out.space.states[static_cast<std::size_t>(
        out.priority_state_of_root_meta())];
    er.assignment = out.partition.assignment;
    er.k = out.partition.k;
    er.exact_time = time_counts(out.pm, er.assignment, er.k, 1.0, 0,
                                params.weighted_counts);
    er.pm = std::move(out.pm);
    exact.push_back(std::move(er));
  }

  std::vector<SamplingRow> rows;
  for (double f : fractions) {
    SamplingRow row;
    row.fraction = f;
    double disp = 0.0;
    double ratio = 0.0;
    for (std::size_t ri = 0; ri < roots.size(); ++ri) {
      SsxParams p = params;
      p.sample_fraction = f;
      const SsxOutcome out = run_ssx(env, policy, roots[ri], p);
      const GridState pri = out.space.states[static_cast<std::size_t>(
          out.priority_state_of_root_meta())];
      disp += agent_distance(pri, exact[ri].priority);
      const double t = time_counts(exact[ri].pm, exact[ri].assignment, exact[ri].k,
                                   f, Rng::mix(params.seed, 0x7157ULL),
                                   params.weighted_counts);
      ratio += t / exact[ri].exact_time;
    }
    row.mean_displacement = disp / static_cast<double>(roots.size());
    row.mean_time_ratio = ratio / static_cast<double>(roots.size());
    rows.push_back(row);
  }
  return rows;
}

int HorizonTables::cell_index(int i, int j) const {
  const int m = static_cast<int>(n_values.size());
  return i * m - i * (i - 1) / 2 + (j - i);
}

HorizonTables horizon_faithfulness(const std::shared_ptr<Env>& env,
                                   const Policy& policy,
                                   const std::vector<GridState>& roots,
                                   const std::vector<int>& n_values,
                                   const SsxParams& params) {
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1])
      throw ConfigError("horizon_faithfulness: N values must be ascending");

  // Priority strategic state per (root, N).
  std::vector<std::vector<GridState>> pri(roots.size());
  for (std::size_t ri = 0; ri < roots.size(); ++ri) {
    for (int n : n_values) {
      SsxParams p = params;
      p.horizon = n;
      const SsxOutcome out = run_ssx(env, policy, roots[ri], p);
      pri[ri].push_back(out.space.states[static_cast<std::size_t>(
          out.priority_state_of_root_meta())]);
    }
  }

  HorizonTables tables;
  tables.n_values = n_values;
  tables.agent.assign(static_cast<std::size_t>(tables.pairs()), 0.0);
  tables.ghost.assign(static_cast<std::size_t>(tables.pairs()), 0.0);
  tables.food.assign(static_cast<std::size_t>(tables.pairs()), 0.0);

  const int m = static_cast<int>(n_values.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double a = 0.0, g = 0.0, f = 0.0;
      int g_trials = 0;
      for (std::size_t ri = 0; ri < roots.size(); ++ri) {
        const GridState& x = pri[ri][static_cast<std::size_t>(i)];
        const GridState& y = pri[ri][static_cast<std::size_t>(j)];
        a += agent_distance(x, y);
        f += food_distance(x, y);
        if (x.ghost_present() && y.ghost_present()) {
          const double dr = x.ghost.row - y.ghost.row;
          const double dc = x.ghost.col - y.ghost.col;
          g += std::sqrt(dr * dr + dc * dc);
          ++g_trials;
        }
      }
      const int idx = tables.cell_index(i, j);
      const double nr = static_cast<double>(roots.size());
      tables.agent[static_cast<std::size_t>(idx)] = a / nr;
      tables.food[static_cast<std::size_t>(idx)] = f / nr;
      tables.ghost[static_cast<std::size_t>(idx)] =
          g_trials > 0 ? g / g_trials : 0.0;
    }
  }
  return tables;
}

StabilityReport perturbation_stability(const std::shared_ptr<Env>& env,
                                       const Policy& policy,
                                       const std::vector<GridState>& roots,
                                       int n_perturbations, int n_food_removed,
                                       std::uint64_t seed, const SsxParams& params) {
  StabilityReport report;
  report.seed = seed;
  double a = 0.0, g = 0.0, f = 0.0;
  int trials = 0, g_trials = 0;

  for (std::size_t ri = 0; ri < roots.size(); ++ri) {
    const GridState& root = roots[ri];
    const SsxOutcome base = run_ssx(env, policy, root, params);
    const GridState base_pri = base.space.states[static_cast<std::size_t>(
        base.priority_state_of_root_meta())];

    std::vector<int> bits;
    for (int b = 0; b < 64; ++b)
      if ((root.food >> b) & 1) bits.push_back(b);

    for (int p = 0; p < n_perturbations; ++p) {
      Rng rng(Rng::mix(Rng::mix(seed, ri), static_cast<std::uint64_t>(p)));
      GridState pert = root;
      const int remove = std::min<int>(n_food_removed, static_cast<int>(bits.size()));
      const std::vector<int> picks =
          rng.sample_indices(static_cast<int>(bits.size()), remove);
      for (int pick : picks)
        pert.food &= ~(std::uint64_t{1} << bits[static_cast<std::size_t>(pick)]);
      if (env->is_terminal(pert)) continue;  // e.g. the removal cleared the board

      const SsxOutcome out = run_ssx(env, policy, pert, params);
      const GridState pri = out.space.states[static_cast<std::size_t>(
          out.priority_state_of_root_meta())];
      a += agent_distance(pri, base_pri);
      f += food_distance(pri, base_pri);
      if (pri.ghost_present() && base_pri.ghost_present()) {
        const double dr = pri.ghost.row - base_pri.ghost.row;
        const double dc = pri.ghost.col - base_pri.ghost.col;
        g += std::sqrt(dr * dr + dc * dc);
        ++g_trials;
      }
      ++trials;
    }
  }
  if (trials > 0) {
    report.agent = a / trials;
    report.food = f / trials;
  }
  if (g_trials > 0) report.ghost = g / g_trials;
  report.trials = trials;
  return report;
}

std::vector<GrowthRow> growth_study(const std::shared_ptr<Env>& env, int n_max,
                                    int samples, std::uint64_t seed) {
  if (n_max < 2) throw ConfigError("growth_study: n_max must be >= 2");
  std::vector<int> actions(env->actions().size());
  std::iota(actions.begin(), actions.end(), 0);

  std::vector<GridState> roots;
  const auto* mp = dynamic_cast<const MiniPacEnv*>(env.get());
  Rng rng(Rng::mix(seed, 0x9a07bULL));
  for (int i = 0; i < samples; ++i) {
    if (mp) {
      roots.push_back(random_minipac_board(*mp, rng, 1, true, 0));
    } else {
      const Grid& grid = env->grid();
      for (;;) {
        const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.rows())));
        const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.cols())));
        if (grid.wall(r, c)) continue;
        GridState s;
        s.agent = Cell{r, c};
        roots.push_back(s);
        break;
      }
    }
  }

  std::vector<GrowthRow> rows;
  rows.push_back({0, 1.0});  // the root alone
  for (int n = 1; n <= n_max; ++n) {
    double total = 0.0;
    for (const GridState& root : roots)
      // The growth axis counts entity movements; see the CSV header.
      total += local_approximation(*env, actions, root, n, true).size();
    rows.push_back({n, total / static_cast<double>(roots.size())});
  }
  return rows;
}

std::vector<KSweepRow> k_sweep(const std::shared_ptr<Env>& env, const Policy& policy,
                               const GridState& root, const std::vector<int>& k_values,
                               const SsxParams& params) {
  for (std::size_t i = 1; i < k_values.size(); ++i)
    if (k_values[i] <= k_values[i - 1])
      throw ConfigError("k_sweep: k values must be ascending");

  StateSpace space;
  if (params.horizon > 0) {
    std::vector<int> actions(env->actions().size());
    std::iota(actions.begin(), actions.end(), 0);
    space = local_approximation(*env, actions, root, params.horizon,
                                params.horizon_moves, &policy);
  } else {
    space = enumerate_reachable(*env, root, params.max_states);
  }
  const TransitionModel model = induce_transition_model(*env, policy, space);
  const PathMatrix pm = build_gamma_cached(model, params.cache_dir, params.threads);

  std::vector<KSweepRow> rows;
  for (int k : k_values) {
    if (k < 2 || k > space.size()) continue;
    const SpectralEmbedding emb = spectral_embed(pm, k);
    ClusterParams cp;
    cp.k = k;
    cp.eta = params.eta;
    cp.eps_phi = params.eps_phi;
    cp.seed = params.seed;
    cp.restarts = params.restarts;
    cp.sample_fraction = params.sample_fraction;
    cp.normalize_counts = params.normalize_counts;
    cp.weighted_counts = params.weighted_counts;
    const MetaStatePartition part = cluster_meta_states(emb, pm, cp);
    rows.push_back({k, part.objective});
  }
  return rows;
}

}  // namespace ssx
