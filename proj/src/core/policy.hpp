#pragma once

#include <memory>
#include <vector>

#include "core/env.hpp"
#include "core/rng.hpp"

namespace ssx {

/// An expert policy: a probability distribution over the environment's
/// actions for every state. Implementations are immutable and thread-safe.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<double> action_distribution(const GridState& state) const = 0;
};

struct ValueIterationResult {
  StateSpace space;
  std::vector<double> values;                // per state index
  std::vector<std::vector<double>> q;        // per state, per action
  std::shared_ptr<Policy> policy;            // softmax over q
  int iterations = 0;
  double residual = 0.0;
};

/// Tabular value iteration over the full reachable space, returning the
/// optimal value/Q tables and a softmax policy over Q (temperature > 0 keeps
/// the policy stochastic; small values stay near-greedy).
ValueIterationResult value_iteration(const std::shared_ptr<Env>& env,
                                     double discount, double tolerance,
                                     int max_iters, double temperature = 0.1);

/// Heuristic MiniPac expert. Eat: heads for the nearest remaining food,
/// strongly avoids an inedible ghost within maze distance 2 and avoids the
/// pill. Hunt: heads for the pill while the ghost is inedible, then for the
/// ghost. Deterministic given (state, temperature).
std::shared_ptr<Policy> scripted_minipac_policy(const std::shared_ptr<Env>& env,
                                                RewardScheme scheme,
                                                double temperature);

/// One-step state-to-state likelihoods f(s, s') obtained by marginalizing a
/// policy's action distribution through the environment dynamics. Rows are
/// sparse and sorted by target index. Boundary states of local approximations
/// are absorbing.
class TransitionModel {
 public:
  using Row = std::vector<std::pair<int, double>>;

  int size() const { return static_cast<int>(rows_.size()); }
  const Row& support(int s) const { return rows_.at(static_cast<std::size_t>(s)); }
  double likelihood(int s, int t) const;
  bool absorbing(int s) const { return absorbing_.at(static_cast<std::size_t>(s)) != 0; }

  static TransitionModel from_rows(std::vector<Row> rows,
                                   std::vector<std::uint8_t> absorbing);

 private:
  std::vector<Row> rows_;
  std::vector<std::uint8_t> absorbing_;
};

TransitionModel induce_transition_model(const Env& env, const Policy& policy,
                                        const StateSpace& space);

/// Sample a trajectory of `steps` composite moves (states after each move).
std::vector<GridState> rollout(const Env& env, const Policy& policy,
                               const GridState& start, int steps, Rng& rng);

}  // namespace ssx
