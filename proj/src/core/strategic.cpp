#include "core/strategic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace ssx {

double objective_eq3(const std::vector<int>& picks, int phi, const CountTable& counts,
                     const PathMatrix& pm, double lambda) {
  double obj = 0.0;
  for (int g : picks) obj += counts.at(g, phi);
  for (std::size_t i = 0; i < picks.size(); ++i)
    for (std::size_t j = i + 1; j < picks.size(); ++j)
      obj -= lambda * pm.gamma_sym(picks[i], picks[j]);
  return obj;
}

double marginal_gain(const std::vector<int>& current, int candidate, int phi,
                     const CountTable& counts, const PathMatrix& pm, double lambda) {
  double gain = counts.at(candidate, phi);
  for (int g : current) gain -= lambda * pm.gamma_sym(candidate, g);
  return gain;
}

namespace {

StrategicSet select_for_meta_state(int phi, const std::vector<int>& members,
                                   const CountTable& counts, const PathMatrix& pm,
                                   const GreedyParams& params) {
  StrategicSet set;
  set.meta_state = phi;
  set.lambda = params.lambda;
  if (members.empty()) {
    set.degenerate = true;
    return set;
  }

  double total_count = 0.0;
  for (int s : members) total_count += counts.at(s, phi);

  double objective = 0.0;
  const int cap = params.max_per_meta > 0
                      ? std::min<int>(params.max_per_meta, static_cast<int>(members.size()))
                      : static_cast<int>(members.size());
  while (static_cast<int>(set.states.size()) < cap) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int s : members) {
      if (std::find(set.states.begin(), set.states.end(), s) != set.states.end())
        continue;
      const double gain = marginal_gain(set.states, s, phi, counts, pm, params.lambda);
      bool better = gain > best_gain;
      if (!better && gain == best_gain && best >= 0) {
        const double cs = counts.at(s, phi);
        const double cb = counts.at(best, phi);
        better = cs > cb || (cs == cb && s < best);
      }
      if (better || best < 0) {
        best = s;
        best_gain = gain;
      }
    }
    if (best < 0) break;
    if (!set.states.empty()) {
      if (best_gain < params.eps_g) break;
      if (best_gain < params.min_gain_ratio * std::abs(objective)) break;
    }
    set.states.push_back(best);
    set.gains.push_back(best_gain);
    objective += best_gain;
  }

  if (total_count <= 0.0) set.degenerate = true;  // vacuous objective; max-C pick kept
  return set;
}

}  // namespace

StrategicSelection greedy_strategic(const MetaStatePartition& partition,
                                    const CountTable& counts, const PathMatrix& pm,
                                    const GreedyParams& params, int goal_state) {
  if (counts.n != static_cast<int>(partition.assignment.size()))
    throw DimensionError("greedy_strategic: count table size != |S|");
  if (params.eps_g <= 0.0) throw ConfigError("greedy_strategic: eps_g must be > 0");
  if (params.min_gain_ratio < 0.0 || params.min_gain_ratio >= 1.0)
    throw ConfigError("greedy_strategic: min_gain_ratio must be in [0,1)");
  if (params.lambda <= 0.0) throw ConfigError("greedy_strategic: lambda must be > 0");

  const int k = partition.k;
  std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < partition.assignment.size(); ++i)
    members[static_cast<std::size_t>(partition.assignment[i])].push_back(
        static_cast<int>(i));

  StrategicSelection sel;
  sel.goal_state = goal_state;
  if (goal_state >= 0)
    sel.goal_meta_state = partition.assignment[static_cast<std::size_t>(goal_state)];

  for (int phi = 0; phi < k; ++phi) {
    if (phi == sel.goal_meta_state) {
      StrategicSet set;  // the goal meta-state's only strategic state is the goal
      set.meta_state = phi;
      set.lambda = params.lambda;
      set.states = {goal_state};
      set.gains = {counts.at(goal_state, phi)};
      sel.sets.push_back(std::move(set));
      continue;
    }
    sel.sets.push_back(
        select_for_meta_state(phi, members[static_cast<std::size_t>(phi)], counts, pm,
                              params));
  }
  return sel;
}

std::vector<double> importance_scores(const Env& env,
                                      const std::vector<std::vector<double>>& q_table) {
  const std::size_t na = env.actions().size();
  std::vector<double> scores;
  scores.reserve(q_table.size());
  for (const auto& row : q_table) {
    if (row.size() != na)
      throw DimensionError("importance_scores: Q row length != action count");
    const auto [mn, mx] = std::minmax_element(row.begin(), row.end());
    scores.push_back(*mx - *mn);
  }
  return scores;
}

}  // namespace ssx
