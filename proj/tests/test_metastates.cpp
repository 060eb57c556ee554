#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>

#include "core/errors.hpp"
#include "core/metastates.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace ssx;

namespace {

TransitionModel to_model(const oracle::RandomModel& m) {
  std::vector<TransitionModel::Row> rows = m.rows;
  std::vector<std::uint8_t> absorbing(static_cast<std::size_t>(m.n), 0);
  return TransitionModel::from_rows(std::move(rows), std::move(absorbing));
}

/// Two 3-state cliques with uniform internal transitions and no cross edges.
TransitionModel two_cliques() {
  std::vector<TransitionModel::Row> rows;
  for (int i = 0; i < 6; ++i) {
    const int base = i < 3 ? 0 : 3;
    TransitionModel::Row row;
    for (int j = base; j < base + 3; ++j) row.push_back({j, 1.0 / 3.0});
    rows.push_back(row);
  }
  return TransitionModel::from_rows(std::move(rows),
                                    std::vector<std::uint8_t>(6, 0));
}

/// The affinity/Laplacian construction, written out independently for the
/// Jacobi oracle comparison.
std::vector<std::vector<double>> reference_laplacian(const PathMatrix& pm) {
  const int n = pm.n;
  std::vector<std::vector<double>> w(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            0.5 * (pm.gamma(i, j) + pm.gamma(j, i));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) deg[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (deg[static_cast<std::size_t>(i)] <= 0.0) {
      w[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
      deg[static_cast<std::size_t>(i)] = 1.0;
    }
  }
  std::vector<std::vector<double>> lap(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double norm = w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /
                          std::sqrt(deg[static_cast<std::size_t>(i)] * deg[static_cast<std::size_t>(j)]);
      lap[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i == j ? 1.0 : 0.0) - norm;
    }
  return lap;
}

}  // namespace

TEST_CASE("two disconnected cliques: zero eigenvalue twice, clean separation") {
  const PathMatrix pm = build_gamma(two_cliques());
  const SpectralEmbedding emb = spectral_embed(pm, 2);
  CHECK(emb.eigenvalues[0] == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(emb.eigenvalues[1] == doctest::Approx(0.0).scale(1).epsilon(1e-9));

  // Same clique -> same embedded point; different cliques -> distinct points.
  auto dist2 = [&](int a, int b) {
    double s = 0.0;
    for (int j = 0; j < emb.k; ++j) {
      const double d = emb.row(a)[j] - emb.row(b)[j];
      s += d * d;
    }
    return s;
  };
  CHECK(dist2(0, 1) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(dist2(3, 4) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(dist2(0, 3) > 0.5);

  for (double eta : {0.0, 1.0, 5.0}) {  // the optimum is the cliques at any eta
    ClusterParams params;
    params.k = 2;
    params.eta = eta;
    params.seed = 3;
    const MetaStatePartition part = cluster_meta_states(emb, pm, params);
    CHECK(part.assignment[0] == part.assignment[1]);
    CHECK(part.assignment[1] == part.assignment[2]);
    CHECK(part.assignment[3] == part.assignment[4]);
    CHECK(part.assignment[4] == part.assignment[5]);
    CHECK(part.assignment[0] != part.assignment[3]);
  }
}

TEST_CASE("complete uniform graph has the fully symmetric spectrum") {
  const int n = 6;
  std::vector<TransitionModel::Row> rows;
  for (int i = 0; i < n; ++i) {
    TransitionModel::Row row;
    for (int j = 0; j < n; ++j) row.push_back({j, 1.0 / n});
    rows.push_back(row);
  }
  const PathMatrix pm =
      build_gamma(TransitionModel::from_rows(std::move(rows),
                                             std::vector<std::uint8_t>(n, 0)));
  const SpectralEmbedding emb = spectral_embed(pm, 3);
  // Eigenvalues: 0 once, then n/(n-1) with multiplicity n-1 — every state is
  // interchangeable, so no direction separates them.
  CHECK(emb.eigenvalues[0] == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(emb.eigenvalues[1] == doctest::Approx(6.0 / 5.0));
  CHECK(emb.eigenvalues[2] == doctest::Approx(emb.eigenvalues[1]));
}

TEST_CASE("spectral embedding matches the Jacobi oracle on a random model") {
  std::mt19937_64 gen(123);
  const TransitionModel model = to_model(oracle::random_model(12, gen, 4, 0.0));
  const PathMatrix pm = build_gamma(model);
  const int k = 4;
  const SpectralEmbedding emb = spectral_embed(pm, k);

  const auto lap = reference_laplacian(pm);
  const oracle::JacobiResult jr = oracle::jacobi_eigensolve(lap);

  for (int j = 0; j < k; ++j)
    CHECK(std::abs(emb.eigenvalues[static_cast<std::size_t>(j)] -
                   std::max(0.0, jr.values[static_cast<std::size_t>(j)])) <= 1e-6);

  // Eigenvalues are non-negative and ascending.
  for (int j = 1; j < k; ++j)
    CHECK(emb.eigenvalues[static_cast<std::size_t>(j)] + 1e-12 >=
          emb.eigenvalues[static_cast<std::size_t>(j - 1)]);
  for (int j = 0; j < k; ++j)
    CHECK(emb.eigenvalues[static_cast<std::size_t>(j)] >= 0.0);
}

TEST_CASE("embedding satisfies the eigen residual bound") {
  std::mt19937_64 gen(321);
  const TransitionModel model = to_model(oracle::random_model(12, gen, 4, 0.0));
  const PathMatrix pm = build_gamma(model);
  const auto lap = reference_laplacian(pm);

  // Recover the unnormalized eigenvectors: solve (L - lambda I) v ~ 0 by
  // checking the residual of the Jacobi vectors against our eigenvalues.
  const oracle::JacobiResult jr = oracle::jacobi_eigensolve(lap);
  const SpectralEmbedding emb = spectral_embed(pm, 4);
  for (int j = 0; j < 4; ++j) {
    const auto& v = jr.vectors[static_cast<std::size_t>(j)];
    double res2 = 0.0, norm2 = 0.0;
    for (int r = 0; r < pm.n; ++r) {
      double lv = 0.0;
      for (int c = 0; c < pm.n; ++c)
        lv += lap[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
              v[static_cast<std::size_t>(c)];
      const double diff =
          lv - emb.eigenvalues[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(r)];
      res2 += diff * diff;
      norm2 += v[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(r)];
    }
    CHECK(std::sqrt(res2) <= 1e-6 * std::sqrt(norm2) + 1e-9);
  }
}

TEST_CASE("eta = 0 reproduces plain k-means with the same seeded start") {
  std::mt19937_64 gen(55);
  const TransitionModel model = to_model(oracle::random_model(14, gen, 4, 0.0));
  const PathMatrix pm = build_gamma(model);
  const SpectralEmbedding emb = spectral_embed(pm, 3);

  ClusterParams params;
  params.k = 3;
  params.eta = 0.0;
  params.seed = 9;
  params.restarts = 1;
  const MetaStatePartition part = cluster_meta_states(emb, pm, params);

  // Plain seeded k-means written out longhand with the same init and repair.
  const int n = emb.n, k = 3;
  Rng rng(Rng::mix(9, 0));
  std::vector<int> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    a[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(k));
  auto repair = [&](std::vector<int>& asg) {
    for (;;) {
      std::vector<int> sizes(static_cast<std::size_t>(k), 0);
      for (int x : asg) ++sizes[static_cast<std::size_t>(x)];
      int empty = -1;
      for (int c = 0; c < k; ++c)
        if (sizes[static_cast<std::size_t>(c)] == 0) {
          empty = c;
          break;
        }
      if (empty < 0) return;
      const auto cent = compute_centroids(emb, asg, k);
      int best = -1;
      double best_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(asg[static_cast<std::size_t>(i)])] <= 1) continue;
        double d = 0.0;
        for (int j = 0; j < emb.k; ++j) {
          const double diff =
              emb.row(i)[j] - cent[static_cast<std::size_t>(asg[static_cast<std::size_t>(i)]) * emb.k + j];
          d += diff * diff;
        }
        if (d > best_d) {
          best_d = d;
          best = i;
        }
      }
      asg[static_cast<std::size_t>(best)] = empty;
    }
  };
  repair(a);
  for (int iter = 0; iter < 200; ++iter) {
    const auto cent = compute_centroids(emb, a, k);
    std::vector<int> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d = 0.0;
        for (int j = 0; j < emb.k; ++j) {
          const double diff = emb.row(i)[j] - cent[static_cast<std::size_t>(c) * emb.k + j];
          d += diff * diff;
        }
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      next[static_cast<std::size_t>(i)] = arg;
    }
    repair(next);
    if (next == a) break;
    a = next;
  }
  CHECK(part.assignment == a);
}

TEST_CASE("best of restarts is within 10% of the exhaustive optimum") {
  std::mt19937_64 gen(777);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 6 + static_cast<int>(gen() % 3);
    const TransitionModel model = to_model(oracle::random_model(n, gen, 3, 0.0));
    const PathMatrix pm = build_gamma(model);
    const SpectralEmbedding emb = spectral_embed(pm, 2);

    double best = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
      std::vector<int> a(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = (mask >> i) & 1;
      best = std::min(best, objective_eq2(emb, pm, a, 2, 1.0));
    }

    ClusterParams params;
    params.k = 2;
    params.eta = 1.0;
    params.seed = 100 + static_cast<std::uint64_t>(trial);
    params.restarts = 5;
    const MetaStatePartition part = cluster_meta_states(emb, pm, params);
    CHECK(part.objective <= best + 0.10 * std::abs(best) + 1e-9);
    CHECK(part.objective + 1e-9 >= best);  // cannot beat the exhaustive optimum
  }
}

TEST_CASE("objective history is monotone and the loop terminates") {
  std::mt19937_64 gen(4242);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + static_cast<int>(gen() % 10);
    const TransitionModel model = to_model(oracle::random_model(n, gen, 4, 0.05));
    const PathMatrix pm = build_gamma(model);
    const int k = 2 + static_cast<int>(gen() % 3);
    const SpectralEmbedding emb = spectral_embed(pm, k);
    ClusterParams params;
    params.k = k;
    params.eta = static_cast<double>(gen() % 4);
    params.seed = static_cast<std::uint64_t>(trial);
    params.restarts = 2;
    const MetaStatePartition part = cluster_meta_states(emb, pm, params);
    REQUIRE(!part.history.empty());
    for (std::size_t i = 1; i < part.history.size(); ++i)
      CHECK(part.history[i] <= part.history[i - 1] + 1e-9);
    CHECK(part.objective == doctest::Approx(part.history.back()));
  }
}

TEST_CASE("clustering is seed-deterministic and never leaves empty clusters") {
  std::mt19937_64 gen(31);
  const TransitionModel model = to_model(oracle::random_model(9, gen, 3, 0.0));
  const PathMatrix pm = build_gamma(model);
  const SpectralEmbedding emb = spectral_embed(pm, 5);
  ClusterParams params;
  params.k = 5;
  params.eta = 1.0;
  params.seed = 77;
  const MetaStatePartition a = cluster_meta_states(emb, pm, params);
  const MetaStatePartition b = cluster_meta_states(emb, pm, params);
  CHECK(a.assignment == b.assignment);
  CHECK(a.objective == b.objective);

  std::set<int> used(a.assignment.begin(), a.assignment.end());
  CHECK(used.size() == 5);
}

TEST_CASE("partition structure is stable under state relabeling") {
  // Unique optimum (two cliques): permuting state labels permutes membership.
  const TransitionModel model = two_cliques();
  const PathMatrix pm = build_gamma(model);
  const SpectralEmbedding emb = spectral_embed(pm, 2);
  ClusterParams params;
  params.k = 2;
  params.eta = 1.0;
  params.seed = 5;
  const MetaStatePartition base = cluster_meta_states(emb, pm, params);

  const std::vector<int> perm = {4, 2, 0, 5, 1, 3};  // new index of old state i
  std::vector<TransitionModel::Row> rows(6);
  for (int i = 0; i < 6; ++i) {
    TransitionModel::Row row;
    for (const auto& [j, p] : model.support(i))
      row.push_back({perm[static_cast<std::size_t>(j)], p});
    std::sort(row.begin(), row.end());
    rows[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = row;
  }
  const PathMatrix pm2 = build_gamma(
      TransitionModel::from_rows(std::move(rows), std::vector<std::uint8_t>(6, 0)));
  const SpectralEmbedding emb2 = spectral_embed(pm2, 2);
  const MetaStatePartition relabeled = cluster_meta_states(emb2, pm2, params);

  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const bool together =
          base.assignment[static_cast<std::size_t>(i)] ==
          base.assignment[static_cast<std::size_t>(j)];
      const bool together2 =
          relabeled.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
          relabeled.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
      CHECK(together == together2);
    }
}

TEST_CASE("objective_eq2 degenerate cases") {
  const TransitionModel model = two_cliques();
  const PathMatrix pm = build_gamma(model);
  const SpectralEmbedding emb = spectral_embed(pm, 2);

  // All six states in one cluster of a k=1 partition: the distance term is
  // the within-cluster scatter; with eta = 0 and identical rows it is zero
  // for each clique cluster under k=2.
  const std::vector<int> cliques = {0, 0, 0, 1, 1, 1};
  const double obj = objective_eq2(emb, pm, cliques, 2, 0.0);
  CHECK(obj == doctest::Approx(0.0).scale(1).epsilon(1e-9));

  // Single state, k=1: no out-paths exist, objective is exactly 0.
  std::vector<TransitionModel::Row> solo = {{{0, 1.0}}};
  const PathMatrix pm1 =
      build_gamma(TransitionModel::from_rows(std::move(solo), {1}));
  SpectralEmbedding emb1;
  emb1.n = 1;
  emb1.k = 1;
  emb1.coords = {1.0};
  emb1.eigenvalues = {0.0};
  CHECK(objective_eq2(emb1, pm1, {0}, 1, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("a larger instance agrees with the reference Laplacian") {
  std::mt19937_64 gen(888);
  const TransitionModel model = to_model(oracle::random_model(700, gen, 5, 0.02));
  const PathMatrix pm = build_gamma(model, 2);
  const int k = 4;
  const SpectralEmbedding emb = spectral_embed(pm, k);

  // Dense reference decomposition of the same Laplacian.
  const auto lap = reference_laplacian(pm);
  Eigen::MatrixXd dense(700, 700);
  for (int i = 0; i < 700; ++i)
    for (int j = 0; j < 700; ++j)
      dense(i, j) = lap[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  REQUIRE(solver.info() == Eigen::Success);
  for (int j = 0; j < k; ++j)
    CHECK(std::abs(emb.eigenvalues[static_cast<std::size_t>(j)] -
                   std::max(0.0, solver.eigenvalues()(j))) <= 1e-6);
}

TEST_CASE("k equal to the state count zeroes the distance term") {
  const TransitionModel model = two_cliques();
  const PathMatrix pm = build_gamma(model);
  const SpectralEmbedding emb = spectral_embed(pm, 6);
  ClusterParams params;
  params.k = 6;
  params.eta = 3.0;
  params.seed = 2;
  const MetaStatePartition part = cluster_meta_states(emb, pm, params);
  std::set<int> used(part.assignment.begin(), part.assignment.end());
  CHECK(used.size() == 6);  // every state is its own centroid
  // Singleton meta-states have no out-paths either, so the optimum is 0.
  CHECK(part.objective == doctest::Approx(0.0).scale(1).epsilon(1e-9));
}

TEST_CASE("cluster parameter validation") {
  const PathMatrix pm = build_gamma(two_cliques());
  const SpectralEmbedding emb = spectral_embed(pm, 2);
  ClusterParams params;
  params.k = 7;  // more clusters than states
  CHECK_THROWS_AS(cluster_meta_states(emb, pm, params), ConfigError);
  CHECK_THROWS_AS(spectral_embed(pm, 1), ConfigError);
  CHECK_THROWS_AS(spectral_embed(pm, 9), ConfigError);
}
