#pragma once

#include <vector>

#include "core/metastates.hpp"
#include "core/pathgraph.hpp"

namespace ssx {

/// Ordered strategic states of one meta-state. Selection order is priority
/// order: states[0] is the priority strategic state. gains[i] is the
/// objective increase when states[i] was added.
struct StrategicSet {
  int meta_state = 0;
  std::vector<int> states;
  std::vector<double> gains;
  double lambda = 0.0;
  bool degenerate = false;  // all counts were zero; fell back to the max-C pick
};

struct GreedyParams {
  double lambda = 1.0;
  double eps_g = 0.1;
  double min_gain_ratio = 0.10;  // a pick must add at least this fraction
  int max_per_meta = 0;          // 0 = unbounded
};

struct StrategicSelection {
  std::vector<StrategicSet> sets;  // one per meta-state
  int goal_meta_state = -1;        // -1 when no goal state is in the space
  int goal_state = -1;
};

/// Selection objective: sum of out-path counts of the picked states minus
/// lambda times the pairwise symmetric path likelihoods (diversity term).
double objective_eq3(const std::vector<int>& picks, int phi, const CountTable& counts,
                     const PathMatrix& pm, double lambda);

/// Marginal objective change of adding `candidate` to `current`:
/// C(candidate, phi) - lambda * sum over picked g of max(gamma both ways).
double marginal_gain(const std::vector<int>& current, int candidate, int phi,
                     const CountTable& counts, const PathMatrix& pm, double lambda);

/// Greedy submodular selection per meta-state. The goal meta-state (when a
/// goal state exists) gets exactly the goal state. The first pick is always
/// made; later picks require gain >= eps_g and gain >= min_gain_ratio times
/// the current objective. Ties prefer larger count, then lower state index.
StrategicSelection greedy_strategic(const MetaStatePartition& partition,
                                    const CountTable& counts, const PathMatrix& pm,
                                    const GreedyParams& params, int goal_state);

/// Per-state max-minus-min Q gap (importance baseline). Throws on ragged or
/// empty rows.
std::vector<double> importance_scores(const Env& env,
                                      const std::vector<std::vector<double>>& q_table);

}  // namespace ssx
