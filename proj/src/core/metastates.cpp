#include "core/metastates.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ssx {

SpectralEmbedding spectral_embed(const PathMatrix& pm, int k) {
  const int n = pm.n;
  if (k < 2 || k > n) throw ConfigError("spectral_embed: need 2 <= k <= |S|");

  // Affinity: symmetrized path likelihood off the diagonal. Isolated states
  // (zero degree) get a unit self-loop so the normalization stays finite.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double a = 0.5 * (pm.gamma(i, j) + pm.gamma(j, i));
      w(i, j) = a;
      w(j, i) = a;
    }
  Eigen::VectorXd deg = w.rowwise().sum();
  for (int i = 0; i < n; ++i)
    if (deg(i) <= 0.0) {
      w(i, i) = 1.0;
      deg(i) = 1.0;
    }

  // Normalized affinity D^-1/2 W D^-1/2; L = I - that.
  Eigen::VectorXd dinv = deg.array().rsqrt();
  Eigen::MatrixXd anorm = dinv.asDiagonal() * w * dinv.asDiagonal();
  anorm = 0.5 * (anorm + anorm.transpose());  // keep it exactly symmetric

  SpectralEmbedding emb;
  emb.n = n;
  emb.k = k;
  emb.eigenvalues.resize(static_cast<std::size_t>(k));
  emb.coords.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0.0);

  Eigen::MatrixXd lap = -anorm;
  lap.diagonal().array() += 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success)
    throw Error("spectral_embed: eigendecomposition failed");
  const Eigen::VectorXd values = solver.eigenvalues().head(k);
  const Eigen::MatrixXd vectors = solver.eigenvectors().leftCols(k);

  for (int j = 0; j < k; ++j)
    emb.eigenvalues[static_cast<std::size_t>(j)] = std::max(0.0, values(j));
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < k; ++j) {
      const double v = vectors(i, j);
      emb.coords[static_cast<std::size_t>(i) * k + j] = v;
      norm2 += v * v;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (int j = 0; j < k; ++j)
        emb.coords[static_cast<std::size_t>(i) * k + j] *= inv;
    }
  }
  return emb;
}

std::vector<double> compute_centroids(const SpectralEmbedding& emb,
                                      const std::vector<int>& assignment, int k) {
  std::vector<double> centroids(static_cast<std::size_t>(k) * emb.k, 0.0);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < emb.n; ++i) {
    const int a = assignment[static_cast<std::size_t>(i)];
    ++sizes[static_cast<std::size_t>(a)];
    const double* row = emb.row(i);
    for (int j = 0; j < emb.k; ++j)
      centroids[static_cast<std::size_t>(a) * emb.k + j] += row[j];
  }
  for (int c = 0; c < k; ++c) {
    if (sizes[static_cast<std::size_t>(c)] == 0) continue;
    const double inv = 1.0 / sizes[static_cast<std::size_t>(c)];
    for (int j = 0; j < emb.k; ++j)
      centroids[static_cast<std::size_t>(c) * emb.k + j] *= inv;
  }
  return centroids;
}

namespace {

double sq_dist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

/// Move the state farthest from its centroid into each empty cluster.
void repair_empty_clusters(const SpectralEmbedding& emb, std::vector<int>& assignment,
                           int k) {
  for (;;) {
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignment) ++sizes[static_cast<std::size_t>(a)];
    int empty = -1;
    for (int c = 0; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] == 0) {
        empty = c;
        break;
      }
    if (empty < 0) return;
    const std::vector<double> centroids = compute_centroids(emb, assignment, k);
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < emb.n; ++i) {
      const int a = assignment[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(a)] <= 1) continue;  // keep clusters alive
      const double d =
          sq_dist(emb.row(i), centroids.data() + static_cast<std::size_t>(a) * emb.k,
                  emb.k);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best < 0) throw Error("cluster repair: no movable state found");
    assignment[static_cast<std::size_t>(best)] = empty;
  }
}

}  // namespace

double objective_eq2_with_counts(const SpectralEmbedding& emb,
                                 const std::vector<int>& assignment,
                                 const std::vector<double>& centroids, int /*k*/,
                                 double eta, const CountTable& counts,
                                 bool normalize_counts) {
  const double norm =
      normalize_counts ? 1.0 / (static_cast<double>(emb.n) * emb.n) : 1.0;
  double obj = 0.0;
  for (int i = 0; i < emb.n; ++i) {
    const int a = assignment[static_cast<std::size_t>(i)];
    obj += sq_dist(emb.row(i), centroids.data() + static_cast<std::size_t>(a) * emb.k,
                   emb.k);
    obj -= eta * counts.at(i, a) * norm;
  }
  return obj;
}

double objective_eq2(const SpectralEmbedding& emb, const PathMatrix& pm,
                     const std::vector<int>& assignment, int k, double eta,
                     bool normalize_counts, bool weighted_counts) {
  if (static_cast<int>(assignment.size()) != emb.n)
    throw DimensionError("objective_eq2: assignment length != |S|");
  const CountTable counts = out_path_counts(pm, assignment, k, 1.0, 0, weighted_counts);
  const std::vector<double> centroids = compute_centroids(emb, assignment, k);
  return objective_eq2_with_counts(emb, assignment, centroids, k, eta, counts,
                                   normalize_counts);
}

MetaStatePartition cluster_meta_states(const SpectralEmbedding& emb,
                                       const PathMatrix& pm,
                                       const ClusterParams& params) {
  const int n = emb.n;
  const int k = params.k;
  if (k < 1 || k > n) throw ConfigError("cluster_meta_states: need 1 <= k <= |S|");
  if (params.eta < 0.0) throw ConfigError("cluster_meta_states: eta must be >= 0");
  if (params.restarts < 1) throw ConfigError("cluster_meta_states: restarts must be >= 1");

  const double count_norm =
      params.normalize_counts ? 1.0 / (static_cast<double>(n) * n) : 1.0;

  MetaStatePartition best;
  bool have_best = false;

  for (int restart = 0; restart < params.restarts; ++restart) {
    Rng rng(Rng::mix(params.seed, static_cast<std::uint64_t>(restart)));
    std::vector<int> assignment(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      assignment[static_cast<std::size_t>(i)] =
          static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    repair_empty_clusters(emb, assignment, k);

    auto counts_for = [&](const std::vector<int>& a, int iter) {
      const std::uint64_t s =
          Rng::mix(Rng::mix(params.seed, static_cast<std::uint64_t>(restart)),
                   0x5eedULL + static_cast<std::uint64_t>(iter));
      return out_path_counts(pm, a, k, params.sample_fraction, s,
                             params.weighted_counts);
    };

    CountTable counts = counts_for(assignment, 0);
    std::vector<double> centroids = compute_centroids(emb, assignment, k);
    double objective = objective_eq2_with_counts(emb, assignment, centroids, k,
                                                 params.eta, counts,
                                                 params.normalize_counts);
    std::vector<double> history{objective};
    const double eps_phi =
        params.eps_phi > 0.0 ? params.eps_phi
                             : 1e-6 * std::max(std::abs(objective), 1e-6);

    int iter = 0;
    for (; iter < params.max_iterations; ++iter) {
      std::vector<int> proposal(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double val =
              sq_dist(emb.row(i), centroids.data() + static_cast<std::size_t>(c) * emb.k,
                      emb.k) -
              params.eta * counts.at(i, c) * count_norm;
          if (val < best_val) {  // ties keep the lowest meta-state index
            best_val = val;
            arg = c;
          }
        }
        proposal[static_cast<std::size_t>(i)] = arg;
      }
      repair_empty_clusters(emb, proposal, k);
      if (proposal == assignment) break;

      CountTable new_counts = counts_for(proposal, iter + 1);
      std::vector<double> new_centroids = compute_centroids(emb, proposal, k);
      const double new_objective = objective_eq2_with_counts(
          emb, proposal, new_centroids, k, params.eta, new_counts,
          params.normalize_counts);
      if (!(new_objective < objective)) break;  // counts drifted; keep the better state

      const double delta = objective - new_objective;
      assignment.swap(proposal);
      counts = std::move(new_counts);
      centroids.swap(new_centroids);
      objective = new_objective;
      history.push_back(objective);
      if (delta < eps_phi) break;
    }

    if (!have_best || objective < best.objective) {
      have_best = true;
      best.assignment = assignment;
      best.k = k;
      best.centroids = centroids;
      best.objective = objective;
      best.eta = params.eta;
      best.history = history;
      best.seed = params.seed;
      best.iterations = iter;
      best.restart_used = restart;
    }
  }
  return best;
}

}  // namespace ssx
