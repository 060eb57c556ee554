#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/env.hpp"
#include "core/policy.hpp"

namespace ssx {

/// All-pairs maximum-likelihood path structure under a transition model.
/// cost(i,j) is the shortest-path length under edge weights -log f(s,s')
/// (infinity when unreachable), like(i,j) = exp(-cost) is the path
/// likelihood, and pred(i,j) is the predecessor of j on the optimal path
/// from i (pred(i,i) == i; -1 when unreachable).
struct PathMatrix {
  int n = 0;
  std::vector<double> cost;
  std::vector<double> like;
  std::vector<std::int32_t> pred;
  /// Per source, ascending targets with a path (excluding the source itself).
  /// Derived from pred; out-path counting iterates these instead of scanning
  /// the full row for every call.
  std::vector<std::vector<std::int32_t>> reach;

  double d(int i, int j) const { return cost[static_cast<std::size_t>(i) * n + j]; }
  double gamma(int i, int j) const { return like[static_cast<std::size_t>(i) * n + j]; }
  std::int32_t predecessor(int i, int j) const {
    return pred[static_cast<std::size_t>(i) * n + j];
  }
  /// Symmetric path likelihood max(gamma(i,j), gamma(j,i)).
  double gamma_sym(int i, int j) const { return std::max(gamma(i, j), gamma(j, i)); }

  void rebuild_reach();
};

/// Per-source Dijkstra over edges weighted -log f. Edges below
/// `min_likelihood` are dropped. Equal-cost ties prefer the lexicographically
/// smaller predecessor, making the predecessor matrix deterministic.
/// `threads` > 1 computes sources in parallel (rows are independent; results
/// are bit-identical to the sequential order).
PathMatrix build_gamma(const TransitionModel& model, int threads = 1,
                       double min_likelihood = 1e-12);

/// Node sequence of the optimal path from `from` to `to`, inclusive of both
/// endpoints. Throws NoPathError when unreachable.
std::vector<int> path_nodes(const PathMatrix& pm, int from, int to);

/// C(s, Phi) table: for each state s and each meta-state Phi, the number of
/// optimal paths from Phi to its complement with s strictly interior (both
/// endpoints excluded). For s in Phi this is exactly the out-path count; for
/// s outside Phi it is the count s would have as a hypothetical member.
/// When sample_fraction < 1 each (source, target) pair keeps its target with
/// that probability (seeded thinning, one stream per source) and the counts
/// are rescaled by 1/sample_fraction. When `weighted`, each path contributes
/// its likelihood instead of 1.
struct CountTable {
  int n = 0;
  int k = 0;
  std::vector<double> c;  // n x k row-major

  double at(int s, int phi) const { return c[static_cast<std::size_t>(s) * k + phi]; }
};

CountTable out_path_counts(const PathMatrix& pm, const std::vector<int>& assignment,
                           int k, double sample_fraction, std::uint64_t seed,
                           bool weighted);

/// Unique states within `horizon` of `root`, expanding the given agent
/// actions and every positive-probability environment response,
/// deduplicating at each depth. By default the horizon counts game turns;
/// with `move_units` it counts entity movements (a turn where the ghost also
/// moves costs 2, turns stay atomic). When a policy is given, expansion is
/// restricted to its support: transitions whose policy-weighted probability
/// falls below `support_floor` never happen numerically and would otherwise
/// litter the space with likelihood-disconnected islands. boundary[i] marks
/// horizon-deep states with at least one successor outside the set.
StateSpace local_approximation(const Env& env, const std::vector<int>& actions,
                               const GridState& root, int horizon,
                               bool move_units = false,
                               const Policy* policy = nullptr,
                               double support_floor = 1e-12);

/// Content hash of a transition model (keys the on-disk PathMatrix cache).
std::string transition_model_hash(const TransitionModel& model);

void save_path_matrix(const PathMatrix& pm, const std::string& path);
bool load_path_matrix(const std::string& path, PathMatrix& out);

/// build_gamma with an optional on-disk cache; `cache_dir` empty disables it.
PathMatrix build_gamma_cached(const TransitionModel& model,
                              const std::string& cache_dir, int threads = 1);

}  // namespace ssx
