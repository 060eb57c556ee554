#include "core/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace ssx {

namespace {

std::vector<double> softmax(const std::vector<double>& scores, double temperature) {
  std::vector<double> out(scores.size());
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - m) / temperature);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

class SoftmaxQPolicy : public Policy {
 public:
  SoftmaxQPolicy(std::shared_ptr<Env> env,
                 std::unordered_map<StateKey, std::vector<double>, StateKeyHash> table)
      : env_(std::move(env)), table_(std::move(table)) {}

  std::vector<double> action_distribution(const GridState& s) const override {
    const auto it = table_.find(env_->key(s));
    if (it == table_.end())
      throw IndexError("policy: state not covered by the value-iteration table: " +
                       env_->encode(s));
    return it->second;
  }

 private:
  std::shared_ptr<Env> env_;
  std::unordered_map<StateKey, std::vector<double>, StateKeyHash> table_;
};

}  // namespace

ValueIterationResult value_iteration(const std::shared_ptr<Env>& env,
                                     double discount, double tolerance,
                                     int max_iters, double temperature) {
  if (discount <= 0.0 || discount >= 1.0)
    throw ConfigError("value_iteration: discount must be in (0,1)");
  if (tolerance <= 0.0) throw ConfigError("value_iteration: tolerance must be > 0");
  if (temperature <= 0.0)
    throw ConfigError("value_iteration: temperature must be > 0");

  ValueIterationResult res;
  res.space = enumerate_reachable(*env, env->start(), 1 << 20);
  const int n = res.space.size();
  const int na = static_cast<int>(env->actions().size());

  // Precompute outcome lists once; dynamics are pure.
  std::vector<std::vector<std::vector<Outcome>>> dyn(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dyn[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(na));
    for (int a = 0; a < na; ++a)
      dyn[static_cast<std::size_t>(i)].push_back(
          env->step_distribution(res.space.states[static_cast<std::size_t>(i)], a));
  }
  auto state_index = [&](const GridState& s) {
    const int idx = res.space.find(*env, s);
    if (idx < 0) throw IndexError("value_iteration: next state outside the space");
    return idx;
  };

  res.values.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> next(static_cast<std::size_t>(n), 0.0);
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < max_iters && residual > tolerance; ++iter) {
    residual = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < na; ++a) {
        double qa = 0.0;
        for (const Outcome& o : dyn[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)])
          qa += o.prob * (o.reward + discount * res.values[static_cast<std::size_t>(
                                                    state_index(o.next))]);
        best = std::max(best, qa);
      }
      next[static_cast<std::size_t>(i)] = best;
      residual = std::max(residual,
                          std::abs(best - res.values[static_cast<std::size_t>(i)]));
    }
    res.values.swap(next);
  }
  if (residual > tolerance)
    throw ConvergenceError("value_iteration: no convergence after " +
                               std::to_string(max_iters) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           residual);
  res.iterations = iter;
  res.residual = residual;

  res.q.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(na), 0.0));
  std::unordered_map<StateKey, std::vector<double>, StateKeyHash> table;
  table.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < na; ++a) {
      double qa = 0.0;
      for (const Outcome& o : dyn[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)])
        qa += o.prob * (o.reward + discount * res.values[static_cast<std::size_t>(
                                                  state_index(o.next))]);
      res.q[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = qa;
    }
    table.emplace(env->key(res.space.states[static_cast<std::size_t>(i)]),
                  softmax(res.q[static_cast<std::size_t>(i)], temperature));
  }
  res.policy = std::make_shared<SoftmaxQPolicy>(env, std::move(table));
  return res;
}

// ---------------------------------------------------------------------------
// Scripted MiniPac policy

namespace {

class ScriptedMiniPacPolicy : public Policy {
 public:
  ScriptedMiniPacPolicy(std::shared_ptr<MiniPacEnv> env, RewardScheme scheme,
                        double temperature)
      : env_(std::move(env)), scheme_(scheme), temperature_(temperature) {}

  std::vector<double> action_distribution(const GridState& s) const override {
    const int na = static_cast<int>(env_->actions().size());
    if (env_->is_terminal(s)) {
      std::vector<double> uniform(static_cast<std::size_t>(na),
                                  1.0 / static_cast<double>(na));
      return uniform;
    }
    std::vector<double> scores(static_cast<std::size_t>(na), 0.0);
    for (int a = 0; a < na; ++a)
      scores[static_cast<std::size_t>(a)] = score_action(s, a);
    return softmax(scores, temperature_);
  }

 private:
  double score_action(const GridState& s, int action) const {
    const Grid& grid = env_->grid();
    const Action& act = env_->actions()[static_cast<std::size_t>(action)];
    Cell c{s.agent.row + act.dr, s.agent.col + act.dc};
    if (grid.wall(c)) c = s.agent;

    const bool ghost = s.ghost_present();
    const bool edible = s.edible > 0;
    double score = 0.0;
    if (ghost && !edible && c == s.ghost) return -1000.0;  // certain death

    const std::vector<int> dist = grid.bfs_distances(c);
    auto d_to = [&](Cell t) {
      const int d = dist[static_cast<std::size_t>(grid.cell_index(t))];
      return d < 0 ? 1000 : d;
    };

    if (scheme_ == RewardScheme::Eat) {
      int food_d = 0;
      if (s.food != 0) {
        food_d = 1000;
        for (int i = 0; i < env_->food_count(); ++i)
          if ((s.food >> i) & 1)
            food_d = std::min(food_d, d_to(env_->layout().food_cells[static_cast<std::size_t>(i)]));
      }
      score = -static_cast<double>(food_d);
      if (ghost && !edible) {
        const int gd = d_to(s.ghost);
        if (gd <= 2) score -= 25.0 * static_cast<double>(3 - gd);
      }
      if (s.pill && env_->layout().pill && c == *env_->layout().pill) score -= 8.0;
    } else {  // Hunt
      if (!ghost) return 0.0;
      if (edible) {
        score = -static_cast<double>(d_to(s.ghost));
      } else if (s.pill && env_->layout().pill) {
        score = -static_cast<double>(d_to(*env_->layout().pill));
        if (d_to(s.ghost) <= 1) score -= 25.0;
      } else {
        score = static_cast<double>(std::min(d_to(s.ghost), 4));  // wait it out
        if (d_to(s.ghost) <= 1) score -= 25.0;
      }
    }
    return score;
  }

  std::shared_ptr<MiniPacEnv> env_;
  RewardScheme scheme_;
  double temperature_;
};

}  // namespace

std::shared_ptr<Policy> scripted_minipac_policy(const std::shared_ptr<Env>& env,
                                                RewardScheme scheme,
                                                double temperature) {
  if (temperature <= 0.0)
    throw ConfigError("scripted policy: temperature must be > 0");
  auto mp = std::dynamic_pointer_cast<MiniPacEnv>(env);
  if (!mp) throw ConfigError("scripted policy: requires a minipac environment");
  return std::make_shared<ScriptedMiniPacPolicy>(mp, scheme, temperature);
}

// ---------------------------------------------------------------------------
// Policy-marginalized transition model

double TransitionModel::likelihood(int s, int t) const {
  const Row& row = support(s);
  auto it = std::lower_bound(row.begin(), row.end(), t,
                             [](const std::pair<int, double>& e, int key) {
                               return e.first < key;
                             });
  if (it == row.end() || it->first != t) return 0.0;
  return it->second;
}

TransitionModel TransitionModel::from_rows(std::vector<Row> rows,
                                           std::vector<std::uint8_t> absorbing) {
  TransitionModel m;
  if (rows.size() != absorbing.size())
    throw DimensionError("TransitionModel: rows/absorbing size mismatch");
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    double sum = 0.0;
    for (const auto& [t, p] : row) {
      (void)t;
      if (p < 0.0 || p > 1.0 + 1e-9)
        throw InvalidModelError("TransitionModel: likelihood outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw InvalidModelError("TransitionModel: row does not sum to 1");
  }
  m.rows_ = std::move(rows);
  m.absorbing_ = std::move(absorbing);
  return m;
}

TransitionModel induce_transition_model(const Env& env, const Policy& policy,
                                        const StateSpace& space) {
  const int n = space.size();
  const int na = static_cast<int>(env.actions().size());
  std::vector<TransitionModel::Row> rows(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> absorbing(static_cast<std::size_t>(n), 0);

  for (int i = 0; i < n; ++i) {
    const GridState& s = space.states[static_cast<std::size_t>(i)];
    const bool cut = space.boundary[static_cast<std::size_t>(i)] != 0;
    if (cut || env.is_terminal(s)) {
      rows[static_cast<std::size_t>(i)] = {{i, 1.0}};
      absorbing[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    const std::vector<double> pi = policy.action_distribution(s);
    if (static_cast<int>(pi.size()) != na)
      throw DimensionError("induce_transition_model: policy distribution length");
    std::unordered_map<int, double> acc;
    double kept_mass = 0.0;
    for (int a = 0; a < na; ++a) {
      if (pi[static_cast<std::size_t>(a)] <= 0.0) continue;
      for (const Outcome& o : env.step_distribution(s, a)) {
        const double mass = pi[static_cast<std::size_t>(a)] * o.prob;
        if (mass < 1e-12) continue;  // numerically never happens
        const int j = space.find(env, o.next);
        if (j < 0)
          throw IndexError("induce_transition_model: successor outside the state space");
        acc[j] += mass;
        kept_mass += mass;
      }
    }
    TransitionModel::Row row(acc.begin(), acc.end());
    std::sort(row.begin(), row.end());
    // Renormalize away the dropped sliver so rows stay exact distributions.
    if (kept_mass > 0.0 && kept_mass < 1.0)
      for (auto& [j, p] : row) {
        (void)j;
        p /= kept_mass;
      }
    rows[static_cast<std::size_t>(i)] = std::move(row);
  }
  return TransitionModel::from_rows(std::move(rows), std::move(absorbing));
}

std::vector<GridState> rollout(const Env& env, const Policy& policy,
                               const GridState& start, int steps, Rng& rng) {
  std::vector<GridState> traj;
  traj.reserve(static_cast<std::size_t>(steps));
  GridState s = start;
  for (int t = 0; t < steps; ++t) {
    const std::vector<double> pi = policy.action_distribution(s);
    double u = rng.uniform01();
    int a = 0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      if (u < pi[i] || i + 1 == pi.size()) {
        a = static_cast<int>(i);
        break;
      }
      u -= pi[i];
    }
    const std::vector<Outcome> outs = env.step_distribution(s, a);
    double v = rng.uniform01();
    const Outcome* pick = &outs.back();
    for (const Outcome& o : outs) {
      if (v < o.prob) {
        pick = &o;
        break;
      }
      v -= o.prob;
    }
    s = pick->next;
    traj.push_back(s);
  }
  return traj;
}

}  // namespace ssx
