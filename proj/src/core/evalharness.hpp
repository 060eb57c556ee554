#pragma once

#include <cstdint>
#include <vector>

#include "core/ssxrun.hpp"

namespace ssx {

/// Euclidean distance between agent (or ghost) positions of two states.
double agent_distance(const GridState& a, const GridState& b);
/// Euclidean norm of the food-indicator difference: sqrt(#bits differing).
double food_distance(const GridState& a, const GridState& b);

/// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Non-terminal study roots: the start state plus states along a seeded
/// policy rollout, deduplicated, evenly subsampled down to `count`.
std::vector<GridState> study_roots(const std::shared_ptr<Env>& env,
                                   const Policy& policy, int count,
                                   int rollout_steps, std::uint64_t seed);

/// Random MiniPac board: random agent/ghost placement (maze distance at
/// least `min_ghost_dist`), full food, optional pill/edible timer.
GridState random_minipac_board(const MiniPacEnv& env, Rng& rng, int min_ghost_dist,
                               bool pill_present, int edible);

struct SamplingRow {
  double fraction = 1.0;
  double mean_displacement = 0.0;  // priority strategic state, agent position
  double mean_time_ratio = 0.0;    // sampled / exact single C computation
};

/// Out-path count subsampling study: displacement of the priority strategic
/// state of the root's meta-state versus the exact run, and the wall-clock
/// ratio of a single C computation at each fraction.
std::vector<SamplingRow> sampling_study(const std::shared_ptr<Env>& env,
                                        const Policy& policy,
                                        const std::vector<GridState>& roots,
                                        const std::vector<double>& fractions,
                                        const SsxParams& params);

struct HorizonTables {
  std::vector<int> n_values;
  // Upper-triangle (i <= j) mean distances, indexed via cell(); diagonal is 0.
  std::vector<double> agent;
  std::vector<double> ghost;
  std::vector<double> food;

  int pairs() const {
    const int m = static_cast<int>(n_values.size());
    return m * (m + 1) / 2;
  }
  int cell_index(int i, int j) const;  // requires i <= j
};

/// Priority-strategic-state distances between runs of different local
/// horizons, averaged over roots.
HorizonTables horizon_faithfulness(const std::shared_ptr<Env>& env,
                                   const Policy& policy,
                                   const std::vector<GridState>& roots,
                                   const std::vector<int>& n_values,
                                   const SsxParams& params);

struct StabilityReport {
  double agent = 0.0;
  double ghost = 0.0;
  double food = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Distances between priority strategic states of original and
/// food-perturbed roots (n_food_removed random pieces per perturbation).
StabilityReport perturbation_stability(const std::shared_ptr<Env>& env,
                                       const Policy& policy,
                                       const std::vector<GridState>& roots,
                                       int n_perturbations, int n_food_removed,
                                       std::uint64_t seed, const SsxParams& params);

struct GrowthRow {
  int n = 0;
  double mean_states = 0.0;
};

/// Mean unique local-state count per horizon over random roots.
std::vector<GrowthRow> growth_study(const std::shared_ptr<Env>& env, int n_max,
                                    int samples, std::uint64_t seed);

struct KSweepRow {
  int k = 0;
  double objective = 0.0;
};

/// Final clustering objective per k (best of restarts) on one root's space,
/// for human knee inspection.
std::vector<KSweepRow> k_sweep(const std::shared_ptr<Env>& env, const Policy& policy,
                               const GridState& root, const std::vector<int>& k_values,
                               const SsxParams& params);

}  // namespace ssx
