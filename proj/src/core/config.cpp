#include "core/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace ssx {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned integer for " + key + ": '" + v + "'");
  }
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  std::string cur;
  std::stringstream ss(v);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (cur.empty()) throw ConfigError("config: empty list element in " + key);
    out.push_back(conv(key, cur));
  }
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string fmt_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>)
      out += fmt_double(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "env.type") env_type = v;
  else if (key == "env.grid_size") grid_size = to_int(key, v);
  else if (key == "env.goal_row") goal_row = to_int(key, v);
  else if (key == "env.goal_col") goal_col = to_int(key, v);
  else if (key == "env.layout_path") layout_path = v;
  else if (key == "env.scheme") scheme = v;
  else if (key == "env.pill_duration") pill_duration = to_int(key, v);
  else if (key == "policy.type") policy_type = v;
  else if (key == "policy.temperature") temperature = to_double(key, v);
  else if (key == "policy.discount") discount = to_double(key, v);
  else if (key == "policy.tolerance") vi_tolerance = to_double(key, v);
  else if (key == "policy.max_iters") vi_max_iters = to_int(key, v);
  else if (key == "ssx.k") k = to_int(key, v);
  else if (key == "ssx.eta") eta = to_double(key, v);
  else if (key == "ssx.eps_phi") eps_phi = to_double(key, v);
  else if (key == "ssx.lambda") lambda = to_double(key, v);
  else if (key == "ssx.eps_g") eps_g = to_double(key, v);
  else if (key == "ssx.min_gain_ratio") min_gain_ratio = to_double(key, v);
  else if (key == "ssx.max_strategic_per_meta") max_strategic_per_meta = to_int(key, v);
  else if (key == "ssx.horizon") horizon = to_int(key, v);
  else if (key == "ssx.horizon_unit") horizon_unit = v;
  else if (key == "ssx.sample_fraction") sample_fraction = to_double(key, v);
  else if (key == "ssx.seed") seed = to_u64(key, v);
  else if (key == "ssx.restarts") restarts = to_int(key, v);
  else if (key == "ssx.normalize_counts") normalize_counts = to_bool(key, v);
  else if (key == "ssx.weighted_counts") weighted_counts = to_bool(key, v);
  else if (key == "ssx.root") root = v;
  else if (key == "ssx.threads") threads = to_int(key, v);
  else if (key == "ssx.max_states") max_states = to_int(key, v);
  else if (key == "render.cell_px") cell_px = to_int(key, v);
  else if (key == "render.strip_cell_px") strip_cell_px = to_int(key, v);
  else if (key == "render.samples_per_strip") samples_per_strip = to_int(key, v);
  else if (key == "eval.fractions") eval_fractions = to_list<double>(key, v, to_double);
  else if (key == "eval.n_values") eval_n_values = to_list<int>(key, v, to_int);
  else if (key == "eval.n_max") eval_n_max = to_int(key, v);
  else if (key == "eval.k_values") eval_k_values = to_list<int>(key, v, to_int);
  else if (key == "eval.roots") eval_roots = to_int(key, v);
  else if (key == "eval.rollout_steps") eval_rollout_steps = to_int(key, v);
  else if (key == "eval.n_perturbations") eval_n_perturbations = to_int(key, v);
  else if (key == "eval.n_food_removed") eval_n_food_removed = to_int(key, v);
  else if (key == "eval.growth_samples") eval_growth_samples = to_int(key, v);
  else throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
  if (env_type != "four_rooms" && env_type != "minipac")
    throw ConfigError("config: env.type must be four_rooms or minipac");
  if (env_type == "four_rooms" && grid_size < 5)
    throw ConfigError("config: env.grid_size must be >= 5");
  if (scheme != "eat" && scheme != "hunt")
    throw ConfigError("config: env.scheme must be eat or hunt");
  if (policy_type != "value_iteration" && policy_type != "scripted")
    throw ConfigError("config: policy.type must be value_iteration or scripted");
  if (temperature <= 0.0) throw ConfigError("config: policy.temperature must be > 0");
  if (discount <= 0.0 || discount >= 1.0)
    throw ConfigError("config: policy.discount must be in (0,1)");
  if (k < 1) throw ConfigError("config: ssx.k must be >= 1");
  if (eta < 0.0) throw ConfigError("config: ssx.eta must be >= 0");
  if (lambda <= 0.0) throw ConfigError("config: ssx.lambda must be > 0");
  if (eps_g <= 0.0) throw ConfigError("config: ssx.eps_g must be > 0");
  if (min_gain_ratio < 0.0 || min_gain_ratio >= 1.0)
    throw ConfigError("config: ssx.min_gain_ratio must be in [0,1)");
  if (!(sample_fraction > 0.0) || sample_fraction > 1.0)
    throw ConfigError("config: ssx.sample_fraction must be in (0,1]");
  if (horizon < 0) throw ConfigError("config: ssx.horizon must be >= 0");
  if (horizon_unit != "turns" && horizon_unit != "moves")
    throw ConfigError("config: ssx.horizon_unit must be turns or moves");
  if (restarts < 1) throw ConfigError("config: ssx.restarts must be >= 1");
  if (threads < 1) throw ConfigError("config: ssx.threads must be >= 1");
  if (max_states < 2) throw ConfigError("config: ssx.max_states must be >= 2");
  if (max_strategic_per_meta < 0)
    throw ConfigError("config: ssx.max_strategic_per_meta must be >= 0");
  if (pill_duration < 1) throw ConfigError("config: env.pill_duration must be >= 1");
  for (double f : eval_fractions)
    if (!(f > 0.0) || f > 1.0)
      throw ConfigError("config: eval.fractions must lie in (0,1]");
  for (std::size_t i = 1; i < eval_n_values.size(); ++i)
    if (eval_n_values[i] <= eval_n_values[i - 1])
      throw ConfigError("config: eval.n_values must be ascending");
  for (std::size_t i = 1; i < eval_k_values.size(); ++i)
    if (eval_k_values[i] <= eval_k_values[i - 1])
      throw ConfigError("config: eval.k_values must be ascending");
  if (eval_n_max < 2) throw ConfigError("config: eval.n_max must be >= 2");
  if (eval_roots < 1) throw ConfigError("config: eval.roots must be >= 1");
  if (eval_n_food_removed < 0)
    throw ConfigError("config: eval.n_food_removed must be >= 0");
}

std::string RunConfig::canonical_text() const {
  std::string o;
  o += "env.goal_col = " + std::to_string(goal_col) + "\n";
  o += "env.goal_row = " + std::to_string(goal_row) + "\n";
  o += "env.grid_size = " + std::to_string(grid_size) + "\n";
  o += "env.layout_path = " + layout_path + "\n";
  o += "env.pill_duration = " + std::to_string(pill_duration) + "\n";
  o += "env.scheme = " + scheme + "\n";
  o += "env.type = " + env_type + "\n";
  o += "eval.fractions = " + fmt_list(eval_fractions) + "\n";
  o += "eval.growth_samples = " + std::to_string(eval_growth_samples) + "\n";
  o += "eval.k_values = " + fmt_list(eval_k_values) + "\n";
  o += "eval.n_food_removed = " + std::to_string(eval_n_food_removed) + "\n";
  o += "eval.n_max = " + std::to_string(eval_n_max) + "\n";
  o += "eval.n_perturbations = " + std::to_string(eval_n_perturbations) + "\n";
  o += "eval.n_values = " + fmt_list(eval_n_values) + "\n";
  o += "eval.rollout_steps = " + std::to_string(eval_rollout_steps) + "\n";
  o += "eval.roots = " + std::to_string(eval_roots) + "\n";
  o += "policy.discount = " + fmt_double(discount) + "\n";
  o += "policy.max_iters = " + std::to_string(vi_max_iters) + "\n";
  o += "policy.temperature = " + fmt_double(temperature) + "\n";
  o += "policy.tolerance = " + fmt_double(vi_tolerance) + "\n";
  o += "policy.type = " + policy_type + "\n";
  o += "render.cell_px = " + std::to_string(cell_px) + "\n";
  o += "render.samples_per_strip = " + std::to_string(samples_per_strip) + "\n";
  o += "render.strip_cell_px = " + std::to_string(strip_cell_px) + "\n";
  o += "ssx.eps_g = " + fmt_double(eps_g) + "\n";
  o += "ssx.eps_phi = " + fmt_double(eps_phi) + "\n";
  o += "ssx.eta = " + fmt_double(eta) + "\n";
  o += "ssx.horizon = " + std::to_string(horizon) + "\n";
  o += "ssx.horizon_unit = " + horizon_unit + "\n";
  o += "ssx.k = " + std::to_string(k) + "\n";
  o += "ssx.lambda = " + fmt_double(lambda) + "\n";
  o += "ssx.max_states = " + std::to_string(max_states) + "\n";
  o += "ssx.max_strategic_per_meta = " + std::to_string(max_strategic_per_meta) + "\n";
  o += "ssx.min_gain_ratio = " + fmt_double(min_gain_ratio) + "\n";
  o += "ssx.normalize_counts = " + std::string(normalize_counts ? "true" : "false") + "\n";
  o += "ssx.restarts = " + std::to_string(restarts) + "\n";
  o += "ssx.root = " + root + "\n";
  o += "ssx.sample_fraction = " + fmt_double(sample_fraction) + "\n";
  o += "ssx.seed = " + std::to_string(seed) + "\n";
  o += "ssx.threads = " + std::to_string(threads) + "\n";
  o += "ssx.weighted_counts = " + std::string(weighted_counts ? "true" : "false") + "\n";
  return o;
}

std::string RunConfig::hash() const { return hex64(fnv1a_hash(canonical_text())); }

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    cfg.set(key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  if (name == "four_rooms") {
    cfg.env_type = "four_rooms";
    cfg.policy_type = "value_iteration";
    cfg.k = 4;
    cfg.eta = 1.0;
    cfg.lambda = 50.0;
    cfg.eps_g = 0.1;
    cfg.max_strategic_per_meta = 2;
    cfg.horizon = 0;
    cfg.weighted_counts = true;  // likelihood-weighted out-paths single out doors
  } else if (name == "minipac_eat" || name == "minipac_hunt") {
    cfg.env_type = "minipac";
    cfg.scheme = name == "minipac_eat" ? "eat" : "hunt";
    cfg.policy_type = "scripted";
    cfg.temperature = 0.3;
    cfg.k = 4;
    cfg.eta = 1.0;
    cfg.lambda = 0.1;
    cfg.eps_g = 0.1;
    cfg.max_strategic_per_meta = 5;
    cfg.horizon = 6;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  cfg.validate();
  return cfg;
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace ssx
