#include "core/pipeline.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/evalharness.hpp"
#include "core/render.hpp"

namespace ssx {

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("short write on " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json config_as_json(const RunConfig& cfg) {
  json obj = json::object();
  std::stringstream ss(cfg.canonical_text());
  std::string line;
  while (std::getline(ss, line)) {
    const std::size_t eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    obj[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return obj;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::string& out_dir, PipelineResult& result) {
  // Rerun detection: an existing manifest with the same config hash means
  // this directory already holds the very artifacts being written.
  bool rerun = false;
  const std::string prior_path = out_dir + "/manifest.json";
  if (std::filesystem::exists(prior_path)) {
    try {
      const json prior = json::parse(read_file(prior_path));
      rerun = prior.value("config_hash", std::string()) == cfg.hash();
    } catch (const std::exception&) {
      rerun = false;  // unreadable manifest; treat as a fresh run
    }
  }

  json manifest;
  manifest["ssx_version"] = 1;
  manifest["code_version"] = "0.1.0";
  manifest["command"] = command;
  manifest["config_hash"] = cfg.hash();
  manifest["rerun_of_same_config"] = rerun;
  manifest["seed"] = cfg.seed;
  json files = json::array();
  for (const auto& f : result.files)
    files.push_back(std::filesystem::path(f).filename().string());
  manifest["files"] = files;
  const std::string path = out_dir + "/manifest.json";
  write_file(path, manifest.dump(2) + "\n");
  result.files.push_back(path);
}

std::string csv_join(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ",";
    row += cells[i];
  }
  row += "\n";
  return row;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

RenderOptions render_options_from(const RunConfig& cfg) {
  RenderOptions opt;
  opt.cell_px = cfg.cell_px;
  opt.strip_cell_px = cfg.strip_cell_px;
  opt.samples_per_strip = cfg.samples_per_strip;
  return opt;
}

}  // namespace

std::shared_ptr<Env> build_env(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.env_type == "four_rooms") {
    const int col = cfg.goal_col < 0 ? cfg.grid_size - 1 : cfg.goal_col;
    return four_rooms_env(cfg.grid_size, Cell{cfg.goal_row, col});
  }
  const std::string layout_text =
      cfg.layout_path.empty() ? default_minipac_layout() : read_file(cfg.layout_path);
  return minipac_env_from_text(layout_text, scheme_from_name(cfg.scheme),
                               cfg.pill_duration);
}

std::shared_ptr<Policy> build_policy(const RunConfig& cfg,
                                     const std::shared_ptr<Env>& env) {
  if (cfg.policy_type == "value_iteration") {
    return value_iteration(env, cfg.discount, cfg.vi_tolerance, cfg.vi_max_iters,
                           cfg.temperature)
        .policy;
  }
  return scripted_minipac_policy(env, scheme_from_name(cfg.scheme), cfg.temperature);
}

SsxParams ssx_params_from(const RunConfig& cfg) {
  SsxParams p;
  p.k = cfg.k;
  p.eta = cfg.eta;
  p.eps_phi = cfg.eps_phi;
  p.lambda = cfg.lambda;
  p.eps_g = cfg.eps_g;
  p.min_gain_ratio = cfg.min_gain_ratio;
  p.max_per_meta = cfg.max_strategic_per_meta;
  p.horizon = cfg.horizon;
  p.horizon_moves = cfg.horizon_unit == "moves";
  p.sample_fraction = cfg.sample_fraction;
  p.seed = cfg.seed;
  p.restarts = cfg.restarts;
  p.normalize_counts = cfg.normalize_counts;
  p.weighted_counts = cfg.weighted_counts;
  p.threads = cfg.threads;
  p.max_states = cfg.max_states;
  if (const char* dir = std::getenv("SSX_CACHE_DIR")) p.cache_dir = dir;
  return p;
}

GridState resolve_root(const RunConfig& cfg, const Env& env) {
  if (cfg.root == "start" || cfg.root.empty()) return env.start();
  return env.decode(cfg.root);
}

std::string explanation_to_json(const RunConfig& cfg, const Env& env,
                                const SsxOutcome& outcome) {
  json doc;
  doc["ssx_version"] = 1;
  doc["config"] = config_as_json(cfg);
  doc["config_hash"] = cfg.hash();

  json env_obj;
  env_obj["type"] = cfg.env_type;
  env_obj["rows"] = env.grid().rows();
  env_obj["cols"] = env.grid().cols();
  env_obj["scheme"] = scheme_name(env.scheme());
  env_obj["layout_hash"] = hex64(fnv1a_hash(env.layout_text()));
  env_obj["layout"] = split_lines(env.layout_text());
  doc["env"] = env_obj;

  json space_obj;
  space_obj["local"] = outcome.space.local;
  space_obj["horizon"] = outcome.space.horizon;
  json states = json::array();
  for (const GridState& s : outcome.space.states) states.push_back(env.encode(s));
  space_obj["states"] = states;
  json boundary = json::array();
  for (std::uint8_t b : outcome.space.boundary) boundary.push_back(b != 0);
  space_obj["boundary"] = boundary;
  doc["space"] = space_obj;

  doc["root"] = {{"index", outcome.root_index},
                 {"state", env.encode(outcome.space.states[static_cast<std::size_t>(
                               outcome.root_index)])}};

  const MetaStatePartition& part = outcome.partition;
  json part_obj;
  part_obj["k"] = part.k;
  part_obj["assignment"] = part.assignment;
  part_obj["centroids"] = part.centroids;
  part_obj["objective"] = part.objective;
  part_obj["eta"] = part.eta;
  part_obj["history"] = part.history;
  part_obj["seed"] = part.seed;
  part_obj["iterations"] = part.iterations;
  part_obj["restart_used"] = part.restart_used;
  doc["partition"] = part_obj;

  doc["goal_state"] = outcome.selection.goal_state;
  doc["goal_meta_state"] = outcome.selection.goal_meta_state;

  json strategic = json::array();
  for (const StrategicSet& set : outcome.selection.sets) {
    json s;
    s["meta_state"] = set.meta_state;
    s["states"] = set.states;
    s["gains"] = set.gains;
    s["lambda"] = set.lambda;
    s["degenerate"] = set.degenerate;
    strategic.push_back(s);
  }
  doc["strategic"] = strategic;

  doc["counts"] = {{"sample_fraction", cfg.sample_fraction},
                   {"weighted", cfg.weighted_counts}};
  return doc.dump(2) + "\n";
}

PipelineResult run_explain(const RunConfig& cfg, const std::string& out_dir) {
  const std::shared_ptr<Env> env = build_env(cfg);
  const std::shared_ptr<Policy> policy = build_policy(cfg, env);
  const GridState root = resolve_root(cfg, *env);
  const SsxOutcome outcome = run_ssx(env, *policy, root, ssx_params_from(cfg));

  PipelineResult result;
  result.summary = explanation_to_json(cfg, *env, outcome);
  const std::string json_path = out_dir + "/explanation.json";
  write_file(json_path, result.summary);
  result.files.push_back(json_path);

  const std::string svg = render_explanation(*env, outcome.space, outcome.partition,
                                             outcome.selection,
                                             render_options_from(cfg));
  const std::string svg_path = out_dir + "/explanation.svg";
  write_file(svg_path, svg);
  result.files.push_back(svg_path);

  write_manifest(cfg, "explain", out_dir, result);
  return result;
}

PipelineResult run_train(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.policy_type != "value_iteration")
    throw ConfigError("train: requires policy.type = value_iteration");
  const std::shared_ptr<Env> env = build_env(cfg);
  const ValueIterationResult vi = value_iteration(
      env, cfg.discount, cfg.vi_tolerance, cfg.vi_max_iters, cfg.temperature);

  json doc;
  doc["ssx_version"] = 1;
  doc["config_hash"] = cfg.hash();
  json names = json::array();
  for (const Action& a : env->actions()) names.push_back(a.name);
  doc["actions"] = names;
  json policy = json::object();
  json values = json::object();
  json q = json::object();
  for (int i = 0; i < vi.space.size(); ++i) {
    const GridState& s = vi.space.states[static_cast<std::size_t>(i)];
    const std::string enc = env->encode(s);
    policy[enc] = vi.policy->action_distribution(s);
    values[enc] = vi.values[static_cast<std::size_t>(i)];
    q[enc] = vi.q[static_cast<std::size_t>(i)];
  }
  doc["policy"] = policy;
  doc["values"] = values;
  doc["q"] = q;
  doc["iterations"] = vi.iterations;
  doc["residual"] = vi.residual;

  PipelineResult result;
  result.summary = json{{"iterations", vi.iterations},
                        {"residual", vi.residual},
                        {"states", vi.space.size()}}
                       .dump(2) +
                   "\n";
  const std::string path = out_dir + "/policy.json";
  write_file(path, doc.dump(2) + "\n");
  result.files.push_back(path);
  write_manifest(cfg, "train", out_dir, result);
  return result;
}

namespace {

PipelineResult eval_sampling(const RunConfig& cfg, const std::shared_ptr<Env>& env,
                             const std::shared_ptr<Policy>& policy,
                             const SsxParams& params, const std::string& out_dir) {
  const std::vector<GridState> roots =
      study_roots(env, *policy, cfg.eval_roots, cfg.eval_rollout_steps, cfg.seed);
  const std::vector<SamplingRow> rows =
      sampling_study(env, *policy, roots, cfg.eval_fractions, params);

  std::string csv = "fraction,mean_agent_displacement,mean_time_ratio\n";
  PlotSeries disp{"displacement", {}, {}};
  PlotSeries time{"time ratio", {}, {}};
  for (const SamplingRow& r : rows) {
    csv += csv_join({fmt(r.fraction), fmt(r.mean_displacement), fmt(r.mean_time_ratio)});
    disp.x.push_back(r.fraction);
    disp.y.push_back(r.mean_displacement);
    time.x.push_back(r.fraction);
    time.y.push_back(r.mean_time_ratio);
  }

  PipelineResult result;
  json summary;
  summary["study"] = "sampling";
  summary["roots"] = static_cast<int>(roots.size());
  json jrows = json::array();
  for (const SamplingRow& r : rows)
    jrows.push_back({{"fraction", r.fraction},
                     {"mean_agent_displacement", r.mean_displacement},
                     {"mean_time_ratio", r.mean_time_ratio}});
  summary["rows"] = jrows;
  result.summary = summary.dump(2) + "\n";

  write_file(out_dir + "/sampling.csv", csv);
  result.files.push_back(out_dir + "/sampling.csv");
  write_file(out_dir + "/sampling_displacement.svg",
             render_line_plot("priority strategic state displacement", "fraction",
                              "cells", {disp}));
  result.files.push_back(out_dir + "/sampling_displacement.svg");
  write_file(out_dir + "/sampling_time.svg",
             render_line_plot("single C computation time ratio", "fraction",
                              "ratio vs exact", {time}));
  result.files.push_back(out_dir + "/sampling_time.svg");
  return result;
}

PipelineResult eval_horizon(const RunConfig& cfg, const std::shared_ptr<Env>& env,
                            const std::shared_ptr<Policy>& policy,
                            const SsxParams& params, const std::string& out_dir) {
  const std::vector<GridState> roots =
      study_roots(env, *policy, cfg.eval_roots, cfg.eval_rollout_steps, cfg.seed);
  const HorizonTables tables =
      horizon_faithfulness(env, *policy, roots, cfg.eval_n_values, params);

  std::string csv = "entity,n_i,n_j,mean_distance\n";
  const int m = static_cast<int>(tables.n_values.size());
  struct Entity {
    const char* name;
    const std::vector<double>* cells;
  };
  const Entity entities[3] = {{"agent", &tables.agent},
                              {"ghost", &tables.ghost},
                              {"food", &tables.food}};
  for (const Entity& e : entities)
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        csv += csv_join({e.name, std::to_string(tables.n_values[static_cast<std::size_t>(i)]),
                         std::to_string(tables.n_values[static_cast<std::size_t>(j)]),
                         fmt((*e.cells)[static_cast<std::size_t>(tables.cell_index(i, j))])});

  // One curve per entity: mean distance against the horizon gap.
  std::vector<PlotSeries> series;
  for (const Entity& e : entities) {
    PlotSeries s{e.name, {}, {}};
    for (int dn = 1; dn < m; ++dn) {
      double sum = 0.0;
      int cnt = 0;
      for (int i = 0; i + dn < m; ++i) {
        sum += (*e.cells)[static_cast<std::size_t>(tables.cell_index(i, i + dn))];
        ++cnt;
      }
      s.x.push_back(dn);
      s.y.push_back(sum / cnt);
    }
    series.push_back(s);
  }

  PipelineResult result;
  json summary;
  summary["study"] = "horizon";
  summary["n_values"] = tables.n_values;
  summary["roots"] = static_cast<int>(roots.size());
  json cells = json::array();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      cells.push_back(
          {{"n_i", tables.n_values[static_cast<std::size_t>(i)]},
           {"n_j", tables.n_values[static_cast<std::size_t>(j)]},
           {"agent", tables.agent[static_cast<std::size_t>(tables.cell_index(i, j))]},
           {"ghost", tables.ghost[static_cast<std::size_t>(tables.cell_index(i, j))]},
           {"food", tables.food[static_cast<std::size_t>(tables.cell_index(i, j))]}});
  summary["cells"] = cells;
  result.summary = summary.dump(2) + "\n";

  write_file(out_dir + "/horizon.csv", csv);
  result.files.push_back(out_dir + "/horizon.csv");
  write_file(out_dir + "/horizon.svg",
             render_line_plot("faithfulness vs horizon gap", "N gap",
                              "mean distance", series));
  result.files.push_back(out_dir + "/horizon.svg");
  return result;
}

PipelineResult eval_perturbation(const RunConfig& cfg, const std::shared_ptr<Env>& env,
                                 const std::shared_ptr<Policy>& policy,
                                 const SsxParams& params, const std::string& out_dir) {
  const std::vector<GridState> roots =
      study_roots(env, *policy, cfg.eval_roots, cfg.eval_rollout_steps, cfg.seed);
  const StabilityReport report =
      perturbation_stability(env, *policy, roots, cfg.eval_n_perturbations,
                             cfg.eval_n_food_removed, cfg.seed, params);

  std::string csv = "entity,mean_distance,trials\n";
  csv += csv_join({"agent", fmt(report.agent), std::to_string(report.trials)});
  csv += csv_join({"ghost", fmt(report.ghost), std::to_string(report.trials)});
  csv += csv_join({"food", fmt(report.food), std::to_string(report.trials)});

  PipelineResult result;
  json summary;
  summary["study"] = "perturbation";
  summary["agent"] = report.agent;
  summary["ghost"] = report.ghost;
  summary["food"] = report.food;
  summary["trials"] = report.trials;
  summary["n_food_removed"] = cfg.eval_n_food_removed;
  result.summary = summary.dump(2) + "\n";

  write_file(out_dir + "/perturbation.csv", csv);
  result.files.push_back(out_dir + "/perturbation.csv");
  PlotSeries bars{"mean distance", {1.0, 2.0, 3.0},
                  {report.agent, report.ghost, report.food}};
  write_file(out_dir + "/perturbation.svg",
             render_line_plot("perturbation stability (1=agent 2=ghost 3=food)",
                              "entity", "mean distance", {bars}));
  result.files.push_back(out_dir + "/perturbation.svg");
  return result;
}

PipelineResult eval_growth(const RunConfig& cfg, const std::shared_ptr<Env>& env,
                           const std::string& out_dir) {
  const std::vector<GrowthRow> rows =
      growth_study(env, cfg.eval_n_max, cfg.eval_growth_samples, cfg.seed);
  const double branching = static_cast<double>(env->actions().size());

  std::string csv = "N,mean_unique_states,full_branching_pow,three_pow\n";
  PlotSeries measured{"measured", {}, {}};
  PlotSeries full{"full branching", {}, {}};
  PlotSeries three{"3^N", {}, {}};
  for (const GrowthRow& r : rows) {
    const double fullpow = std::pow(branching, r.n);
    const double threepow = std::pow(3.0, r.n);
    csv += csv_join({std::to_string(r.n), fmt(r.mean_states), fmt(fullpow),
                     fmt(threepow)});
    measured.x.push_back(r.n);
    measured.y.push_back(r.mean_states);
    full.x.push_back(r.n);
    full.y.push_back(fullpow);
    three.x.push_back(r.n);
    three.y.push_back(threepow);
  }

  PipelineResult result;
  json summary;
  summary["study"] = "growth";
  json jrows = json::array();
  for (const GrowthRow& r : rows)
    jrows.push_back({{"N", r.n}, {"mean_unique_states", r.mean_states}});
  summary["rows"] = jrows;
  result.summary = summary.dump(2) + "\n";

  write_file(out_dir + "/growth.csv", csv);
  result.files.push_back(out_dir + "/growth.csv");
  write_file(out_dir + "/growth.svg",
             render_line_plot("local state-space growth", "N", "unique states",
                              {measured, full, three}));
  result.files.push_back(out_dir + "/growth.svg");
  return result;
}

PipelineResult eval_ksweep(const RunConfig& cfg, const std::shared_ptr<Env>& env,
                           const std::shared_ptr<Policy>& policy,
                           const SsxParams& params, const std::string& out_dir) {
  const GridState root = resolve_root(cfg, *env);
  const std::vector<KSweepRow> rows =
      k_sweep(env, *policy, root, cfg.eval_k_values, params);

  // Knee: largest second difference of the objective curve.
  int knee = -1;
  double best_dd = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double dd =
        rows[i - 1].objective - 2.0 * rows[i].objective + rows[i + 1].objective;
    if (dd > best_dd) {
      best_dd = dd;
      knee = rows[i].k;
    }
  }

  std::string csv = "k,objective,knee\n";
  PlotSeries curve{"objective", {}, {}};
  for (const KSweepRow& r : rows) {
    csv += csv_join({std::to_string(r.k), fmt(r.objective),
                     r.k == knee ? "1" : "0"});
    curve.x.push_back(r.k);
    curve.y.push_back(r.objective);
  }

  PipelineResult result;
  json summary;
  summary["study"] = "ksweep";
  summary["knee"] = knee;
  json jrows = json::array();
  for (const KSweepRow& r : rows)
    jrows.push_back({{"k", r.k}, {"objective", r.objective}});
  summary["rows"] = jrows;
  result.summary = summary.dump(2) + "\n";

  write_file(out_dir + "/ksweep.csv", csv);
  result.files.push_back(out_dir + "/ksweep.csv");
  write_file(out_dir + "/ksweep.svg",
             render_line_plot("clustering objective vs k", "k", "objective",
                              {curve}));
  result.files.push_back(out_dir + "/ksweep.svg");
  return result;
}

}  // namespace

PipelineResult run_eval(const RunConfig& cfg, const std::string& study,
                        const std::string& out_dir) {
  const std::shared_ptr<Env> env = build_env(cfg);
  const SsxParams params = ssx_params_from(cfg);

  PipelineResult result;
  if (study == "growth") {
    result = eval_growth(cfg, env, out_dir);
  } else {
    const std::shared_ptr<Policy> policy = build_policy(cfg, env);
    if (study == "sampling")
      result = eval_sampling(cfg, env, policy, params, out_dir);
    else if (study == "horizon")
      result = eval_horizon(cfg, env, policy, params, out_dir);
    else if (study == "perturbation")
      result = eval_perturbation(cfg, env, policy, params, out_dir);
    else if (study == "ksweep")
      result = eval_ksweep(cfg, env, policy, params, out_dir);
    else
      throw ConfigError("eval: unknown study '" + study +
                        "' (expected sampling|horizon|perturbation|growth|ksweep)");
  }
  write_manifest(cfg, "eval:" + study, out_dir, result);
  return result;
}

PipelineResult run_render_file(const std::string& explanation_json_path,
                               const std::string& out_svg_path) {
  const json doc = json::parse(read_file(explanation_json_path));

  RunConfig cfg;
  for (const auto& [key, value] : doc.at("config").items())
    cfg.set(key, value.get<std::string>());
  cfg.validate();
  const std::shared_ptr<Env> env = build_env(cfg);

  StateSpace space;
  space.local = doc.at("space").at("local").get<bool>();
  space.horizon = doc.at("space").at("horizon").get<int>();
  space.root = doc.at("root").at("index").get<int>();
  for (const auto& enc : doc.at("space").at("states")) {
    const GridState s = env->decode(enc.get<std::string>());
    space.index.emplace(env->key(s), space.size());
    space.states.push_back(s);
  }
  for (const auto& b : doc.at("space").at("boundary"))
    space.boundary.push_back(b.get<bool>() ? 1 : 0);

  MetaStatePartition part;
  const json& jp = doc.at("partition");
  part.k = jp.at("k").get<int>();
  part.assignment = jp.at("assignment").get<std::vector<int>>();
  part.centroids = jp.at("centroids").get<std::vector<double>>();
  part.objective = jp.at("objective").get<double>();
  part.eta = jp.at("eta").get<double>();
  part.history = jp.at("history").get<std::vector<double>>();
  part.seed = jp.at("seed").get<std::uint64_t>();

  StrategicSelection sel;
  sel.goal_state = doc.at("goal_state").get<int>();
  sel.goal_meta_state = doc.at("goal_meta_state").get<int>();
  for (const auto& js : doc.at("strategic")) {
    StrategicSet set;
    set.meta_state = js.at("meta_state").get<int>();
    set.states = js.at("states").get<std::vector<int>>();
    set.gains = js.at("gains").get<std::vector<double>>();
    set.lambda = js.at("lambda").get<double>();
    set.degenerate = js.at("degenerate").get<bool>();
    sel.sets.push_back(std::move(set));
  }

  const std::string svg =
      render_explanation(*env, space, part, sel, render_options_from(cfg));
  write_file(out_svg_path, svg);

  PipelineResult result;
  result.summary = json{{"rendered", out_svg_path}}.dump(2) + "\n";
  result.files.push_back(out_svg_path);
  return result;
}

}  // namespace ssx
