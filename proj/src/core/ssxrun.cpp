#include "core/ssxrun.hpp"

#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ssx {

int SsxOutcome::priority_state_of_root_meta() const {
  const int meta = root_meta();
  for (const auto& set : selection.sets)
    if (set.meta_state == meta)
      return set.states.empty() ? root_index : set.states.front();
  return root_index;
}

int detect_goal_state(const Env& env, const StateSpace& space, const PathMatrix& pm) {
  int best = -1;
  double best_mass = -1.0;
  for (int i = 0; i < space.size(); ++i) {
    if (!env.is_goal(space.states[static_cast<std::size_t>(i)])) continue;
    double mass = 0.0;
    for (int s = 0; s < space.size(); ++s) mass += pm.gamma(s, i);
    if (mass > best_mass) {
      best_mass = mass;
      best = i;
    }
  }
  return best;
}

SsxOutcome run_ssx(const std::shared_ptr<Env>& env, const Policy& policy,
                   const GridState& root, const SsxParams& params) {
  SsxOutcome out;
  if (params.horizon > 0) {
    std::vector<int> actions(env->actions().size());
    std::iota(actions.begin(), actions.end(), 0);
    out.space = local_approximation(*env, actions, root, params.horizon,
                                    params.horizon_moves, &policy);
  } else {
    out.space = enumerate_reachable(*env, root, params.max_states);
  }
  out.root_index = out.space.root;

  const TransitionModel model = induce_transition_model(*env, policy, out.space);
  out.pm = build_gamma_cached(model, params.cache_dir, params.threads);

  const int n = out.space.size();
  const int k = std::min(params.k, n);
  if (k < 1) throw ConfigError("run_ssx: empty state space");
  if (k >= 2 && n >= 2) {
    out.emb = spectral_embed(out.pm, k);
    ClusterParams cp;
    cp.k = k;
    cp.eta = params.eta;
    cp.eps_phi = params.eps_phi;
    cp.seed = params.seed;
    cp.restarts = params.restarts;
    cp.sample_fraction = params.sample_fraction;
    cp.normalize_counts = params.normalize_counts;
    cp.weighted_counts = params.weighted_counts;
    out.partition = cluster_meta_states(out.emb, out.pm, cp);
  } else {
    out.emb.n = n;
    out.emb.k = 1;
    out.emb.coords.assign(static_cast<std::size_t>(n), 0.0);
    out.emb.eigenvalues = {0.0};
    out.partition.assignment.assign(static_cast<std::size_t>(n), 0);
    out.partition.k = 1;
    out.partition.centroids.assign(1, 0.0);
    out.partition.eta = params.eta;
    out.partition.seed = params.seed;
    out.partition.objective = 0.0;
    out.partition.history = {0.0};
  }

  out.counts = out_path_counts(out.pm, out.partition.assignment, out.partition.k,
                               params.sample_fraction,
                               Rng::mix(params.seed, 0xC0117ULL),
                               params.weighted_counts);

  const int goal = detect_goal_state(*env, out.space, out.pm);
  GreedyParams gp;
  gp.lambda = params.lambda;
  gp.eps_g = params.eps_g;
  gp.min_gain_ratio = params.min_gain_ratio;
  gp.max_per_meta = params.max_per_meta;
  out.selection = greedy_strategic(out.partition, out.counts, out.pm, gp, goal);
  return out;
}

}  // namespace ssx
