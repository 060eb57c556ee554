#pragma once

#include <cstdint>
#include <vector>

#include "core/pathgraph.hpp"

namespace ssx {

/// Rows of the k bottom eigenvectors of the symmetric normalized Laplacian of
/// the symmetrized path-likelihood affinity, row-normalized to unit length.
struct SpectralEmbedding {
  int n = 0;
  int k = 0;
  std::vector<double> coords;       // n x k row-major
  std::vector<double> eigenvalues;  // k smallest, ascending

  const double* row(int i) const { return coords.data() + static_cast<std::size_t>(i) * k; }
};

SpectralEmbedding spectral_embed(const PathMatrix& pm, int k);

struct ClusterParams {
  int k = 4;
  double eta = 1.0;
  double eps_phi = -1.0;  // <= 0: auto, 1e-6 * |initial objective|
  std::uint64_t seed = 1;
  int restarts = 5;
  double sample_fraction = 1.0;
  bool normalize_counts = true;  // use C/|S|^2 in the objective
  bool weighted_counts = false;  // likelihood-weighted out-paths
  int max_iterations = 200;
};

struct MetaStatePartition {
  std::vector<int> assignment;    // per-state meta-state index in [0,k)
  int k = 0;
  std::vector<double> centroids;  // k x k row-major (embedding space)
  double objective = 0.0;
  double eta = 0.0;
  std::vector<double> history;    // objective per accepted iteration, non-increasing
  std::uint64_t seed = 0;
  int iterations = 0;
  int restart_used = 0;
};

/// Regularized spectral k-means: random seeded init, then alternate
/// {recompute out-path counts under the current assignment, reassign each
/// state to argmin ||emb(s)-c||^2 - eta*C~(s,Phi), recompute centroids}. A
/// pass is accepted only if the freshly evaluated objective improves, which
/// keeps the recorded history monotone and guarantees termination. Best of
/// `restarts` seeded runs by final objective.
MetaStatePartition cluster_meta_states(const SpectralEmbedding& emb,
                                       const PathMatrix& pm,
                                       const ClusterParams& params);

/// The clustering objective: sum over states of squared embedding distance to
/// the assigned centroid minus eta times the (normalized) out-path count.
/// Recomputes exact counts for the given assignment.
double objective_eq2(const SpectralEmbedding& emb, const PathMatrix& pm,
                     const std::vector<int>& assignment, int k, double eta,
                     bool normalize_counts = true, bool weighted_counts = false);

/// Same objective evaluated against a precomputed count table.
double objective_eq2_with_counts(const SpectralEmbedding& emb,
                                 const std::vector<int>& assignment,
                                 const std::vector<double>& centroids, int k,
                                 double eta, const CountTable& counts,
                                 bool normalize_counts);

std::vector<double> compute_centroids(const SpectralEmbedding& emb,
                                      const std::vector<int>& assignment, int k);

}  // namespace ssx
