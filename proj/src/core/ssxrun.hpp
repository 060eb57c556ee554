#pragma once

#include <memory>
#include <string>

#include "core/env.hpp"
#include "core/metastates.hpp"
#include "core/pathgraph.hpp"
#include "core/policy.hpp"
#include "core/strategic.hpp"

namespace ssx {

struct SsxParams {
  int k = 4;
  double eta = 1.0;
  double eps_phi = -1.0;
  double lambda = 1.0;
  double eps_g = 0.1;
  double min_gain_ratio = 0.10;
  int max_per_meta = 0;
  int horizon = 0;  // 0 = full enumeration
  bool horizon_moves = false;  // horizon counts entity moves instead of turns
  double sample_fraction = 1.0;
  std::uint64_t seed = 1;
  int restarts = 5;
  bool normalize_counts = true;
  bool weighted_counts = false;
  int threads = 1;
  int max_states = 200000;
  std::string cache_dir;  // path matrix cache; empty disables
};

struct SsxOutcome {
  StateSpace space;
  PathMatrix pm;
  SpectralEmbedding emb;
  MetaStatePartition partition;
  CountTable counts;  // counts on the final partition, used for selection
  StrategicSelection selection;
  int root_index = 0;

  int root_meta() const {
    return partition.assignment[static_cast<std::size_t>(root_index)];
  }
  /// Priority strategic state of the meta-state containing the root.
  int priority_state_of_root_meta() const;
};

/// The full pipeline on one root: state enumeration (full or N-ball), induced
/// transition model, path matrix, spectral embedding, meta-state clustering,
/// out-path counts, greedy strategic selection.
SsxOutcome run_ssx(const std::shared_ptr<Env>& env, const Policy& policy,
                   const GridState& root, const SsxParams& params);

/// The goal state used for selection: the state with the greatest incoming
/// path-likelihood mass among goal-predicate states, or -1 when the space
/// contains none.
int detect_goal_state(const Env& env, const StateSpace& space, const PathMatrix& pm);

}  // namespace ssx
