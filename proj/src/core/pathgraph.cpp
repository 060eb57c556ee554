#include "core/pathgraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <thread>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ssx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void dijkstra_from(const std::vector<std::vector<std::pair<int, double>>>& adj,
                   int src, int n, double* dist, std::int32_t* pred) {
  std::fill(dist, dist + n, kInf);
  std::fill(pred, pred + n, std::int32_t{-1});
  dist[src] = 0.0;
  pred[src] = static_cast<std::int32_t>(src);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  pq.push({0.0, src});
  std::vector<std::uint8_t> done(static_cast<std::size_t>(n), 0);
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    if (du > dist[u]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
      const double nd = du + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = static_cast<std::int32_t>(u);
        pq.push({nd, v});
      } else if (nd == dist[v] && !done[static_cast<std::size_t>(v)] &&
                 static_cast<std::int32_t>(u) < pred[v]) {
        // Deterministic tie-break. Finalized nodes keep their predecessor so
        // chains follow finalization order and stay acyclic even across
        // zero-cost (likelihood 1) edges.
        pred[v] = static_cast<std::int32_t>(u);
      }
    }
  }
}

}  // namespace

void PathMatrix::rebuild_reach() {
  reach.assign(static_cast<std::size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    const std::int32_t* row = pred.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j)
      if (j != i && row[j] >= 0)
        reach[static_cast<std::size_t>(i)].push_back(static_cast<std::int32_t>(j));
  }
}

PathMatrix build_gamma(const TransitionModel& model, int threads,
                       double min_likelihood) {
  const int n = model.size();
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, p] : model.support(i)) {
      if (p < 0.0 || p > 1.0 + 1e-9)
        throw InvalidModelError("build_gamma: likelihood outside [0,1]");
      if (i == j) continue;            // self-loops never shorten a path
      if (p < min_likelihood) continue;  // avoids -log overflow on dead edges
      adj[static_cast<std::size_t>(i)].push_back({j, -std::log(p)});
    }
  }

  PathMatrix pm;
  pm.n = n;
  pm.cost.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), kInf);
  pm.like.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  pm.pred.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);

  auto run_range = [&](int lo, int hi) {
    for (int src = lo; src < hi; ++src) {
      double* dist = pm.cost.data() + static_cast<std::size_t>(src) * n;
      std::int32_t* pred = pm.pred.data() + static_cast<std::size_t>(src) * n;
      dijkstra_from(adj, src, n, dist, pred);
      double* like = pm.like.data() + static_cast<std::size_t>(src) * n;
      for (int j = 0; j < n; ++j)
        like[j] = std::isinf(dist[j]) ? 0.0 : std::exp(-dist[j]);
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || n < 64) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  pm.rebuild_reach();
  return pm;
}

std::vector<int> path_nodes(const PathMatrix& pm, int from, int to) {
  if (from < 0 || from >= pm.n || to < 0 || to >= pm.n)
    throw IndexError("path_nodes: state index out of range");
  if (pm.predecessor(from, to) < 0)
    throw NoPathError("path_nodes: no path between the requested states");
  std::vector<int> nodes;
  int u = to;
  int guard = pm.n + 1;
  while (u != from) {
    nodes.push_back(u);
    u = pm.predecessor(from, u);
    if (--guard < 0) throw NoPathError("path_nodes: predecessor walk did not terminate");
  }
  nodes.push_back(from);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

CountTable out_path_counts(const PathMatrix& pm, const std::vector<int>& assignment,
                           int k, double sample_fraction, std::uint64_t seed,
                           bool weighted) {
  const int n = pm.n;
  if (static_cast<int>(assignment.size()) != n)
    throw DimensionError("out_path_counts: assignment length != |S|");
  if (!(sample_fraction > 0.0) || sample_fraction > 1.0)
    throw ConfigError("out_path_counts: sample_fraction must be in (0,1]");

  if (static_cast<int>(pm.reach.size()) != n)
    throw DimensionError("out_path_counts: path matrix has no reach lists");
  for (int s = 0; s < n; ++s) {
    const int a = assignment[static_cast<std::size_t>(s)];
    if (a < 0 || a >= k)
      throw DimensionError("out_path_counts: assignment value out of range");
  }

  CountTable table;
  table.n = n;
  table.k = k;
  table.c.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0.0);

  // Seeded thinning: every (source, target) pair keeps its target with
  // probability sample_fraction, rescaled by 1/sample_fraction. One stream
  // per call, consumed in pair order. The halving case walks kept positions
  // directly by skip-counting random bits, which avoids an unpredictable
  // branch per pair.
  const bool thin = sample_fraction < 1.0;
  const bool half = sample_fraction == 0.5;
  const std::uint64_t keep_below = static_cast<std::uint64_t>(
      sample_fraction * 18446744073709551616.0 /* 2^64 */);
  const double w_scale = thin ? 1.0 / sample_fraction : 1.0;
  Rng rng(Rng::mix(seed, 0xC07A11ULL));
  std::uint64_t bits = 0;
  int bits_left = 0;
  double* col = table.c.data();

  auto walk_pair = [&](int src, int phi, const std::int32_t* pred,
                       const double* like, std::int32_t dst) {
    const double w = (weighted ? like[dst] : 1.0) * w_scale;
    std::int32_t u = pred[dst];
    int guard = n + 1;
    while (u != src) {
      col[static_cast<std::size_t>(u) * k + phi] += w;
      u = pred[u];
      if (--guard < 0)
        throw NoPathError("out_path_counts: predecessor walk did not terminate");
    }
  };

  for (int src = 0; src < n; ++src) {
    const int phi = assignment[static_cast<std::size_t>(src)];
    const std::int32_t* pred = pm.pred.data() + static_cast<std::size_t>(src) * n;
    const double* like = pm.like.data() + static_cast<std::size_t>(src) * n;
    const auto& row = pm.reach[static_cast<std::size_t>(src)];

    if (half) {
      // Visit exactly the positions whose random bit is one.
      std::size_t pos = 0;
      while (pos < row.size()) {
        if (bits_left == 0) {
          bits = rng.next();
          bits_left = 64;
        }
        if (bits == 0) {
          pos += static_cast<std::size_t>(bits_left);
          bits_left = 0;
          continue;
        }
        const int gap = std::countr_zero(bits);
        bits = gap >= 63 ? 0 : (bits >> (gap + 1));
        bits_left -= gap + 1;
        pos += static_cast<std::size_t>(gap);
        if (pos >= row.size()) break;
        const std::int32_t dst = row[pos];
        ++pos;
        if (assignment[static_cast<std::size_t>(dst)] == phi) continue;
        walk_pair(src, phi, pred, like, dst);
      }
      continue;
    }

    for (std::int32_t dst : row) {
      if (assignment[static_cast<std::size_t>(dst)] == phi) continue;
      if (thin && rng.next() >= keep_below) continue;
      walk_pair(src, phi, pred, like, dst);
    }
  }
  return table;
}

StateSpace local_approximation(const Env& env, const std::vector<int>& actions,
                               const GridState& root, int horizon,
                               bool move_units, const Policy* policy,
                               double support_floor) {
  if (horizon < 1) throw ConfigError("local_approximation: horizon must be >= 1");
  env.validate(root);
  StateSpace space;
  space.local = true;
  space.horizon = horizon;
  space.root = 0;
  space.index.emplace(env.key(root), 0);
  space.states.push_back(root);
  // In move units a turn where both the agent and the ghost move advances
  // the depth by 2. Turns are atomic either way, so states with depth < N
  // are expanded fully and successors may overshoot N by one.
  std::vector<int> depth{0};

  auto expand = [&](const GridState& s, auto&& visit) {
    std::vector<double> pi;
    if (policy) pi = policy->action_distribution(s);
    for (int a : actions) {
      const double pa = policy ? pi[static_cast<std::size_t>(a)] : 1.0;
      for (const Outcome& o : env.step_distribution(s, a)) {
        if (o.prob <= 0.0) continue;
        if (policy && pa * o.prob < support_floor) continue;
        visit(o);
      }
    }
  };

  std::size_t head = 0;
  while (head < space.states.size()) {
    const int i = static_cast<int>(head);
    const GridState s = space.states[head++];
    const int d = depth[static_cast<std::size_t>(i)];
    if (d >= horizon) continue;  // duplicates removed before deepening
    expand(s, [&](const Outcome& o) {
      const StateKey key = env.key(o.next);
      if (space.index.contains(key)) return;
      space.index.emplace(key, space.size());
      space.states.push_back(o.next);
      depth.push_back(d + (move_units ? o.moves : 1));
    });
  }

  // Horizon-deep states whose expansion would leave the set are cut.
  space.boundary.assign(space.states.size(), 0);
  for (int i = 0; i < space.size(); ++i) {
    if (depth[static_cast<std::size_t>(i)] < horizon) continue;
    bool cut = false;
    expand(space.states[static_cast<std::size_t>(i)], [&](const Outcome& o) {
      if (!space.index.contains(env.key(o.next))) cut = true;
    });
    space.boundary[static_cast<std::size_t>(i)] = cut ? 1 : 0;
  }
  return space;
}

// ---------------------------------------------------------------------------
// PathMatrix disk cache

namespace {

constexpr char kMagic[8] = {'S', 'S', 'X', 'G', 'A', 'M', 'A', '1'};

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string transition_model_hash(const TransitionModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t n = static_cast<std::uint64_t>(model.size());
  h = fnv1a(&n, sizeof(n), h);
  for (int i = 0; i < model.size(); ++i) {
    for (const auto& [j, p] : model.support(i)) {
      const std::uint64_t jj = static_cast<std::uint64_t>(j);
      h = fnv1a(&jj, sizeof(jj), h);
      h = fnv1a(&p, sizeof(p), h);
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_path_matrix(const PathMatrix& pm, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write path matrix cache: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t n = static_cast<std::uint64_t>(pm.n);
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(pm.cost.data()),
            static_cast<std::streamsize>(pm.cost.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(pm.pred.data()),
            static_cast<std::streamsize>(pm.pred.size() * sizeof(std::int32_t)));
  if (!out) throw IoError("short write on path matrix cache: " + path);
}

bool load_path_matrix(const std::string& path, PathMatrix& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) return false;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n > (1u << 20)) return false;
  out.n = static_cast<int>(n);
  const std::size_t cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  out.cost.resize(cells);
  out.pred.resize(cells);
  in.read(reinterpret_cast<char*>(out.cost.data()),
          static_cast<std::streamsize>(cells * sizeof(double)));
  in.read(reinterpret_cast<char*>(out.pred.data()),
          static_cast<std::streamsize>(cells * sizeof(std::int32_t)));
  if (!in) return false;
  out.like.resize(cells);
  for (std::size_t i = 0; i < cells; ++i)
    out.like[i] = std::isinf(out.cost[i]) ? 0.0 : std::exp(-out.cost[i]);
  out.rebuild_reach();
  return true;
}

PathMatrix build_gamma_cached(const TransitionModel& model,
                              const std::string& cache_dir, int threads) {
  if (cache_dir.empty()) return build_gamma(model, threads);
  const std::string path = cache_dir + "/gamma_" + transition_model_hash(model) + ".bin";
  PathMatrix pm;
  if (load_path_matrix(path, pm) && pm.n == model.size()) return pm;
  pm = build_gamma(model, threads);
  save_path_matrix(pm, path);
  return pm;
}

}  // namespace ssx
