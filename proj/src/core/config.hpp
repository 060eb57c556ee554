#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ssx {

/// Full run configuration. Parsed from a flat `section.key = value` text file
/// (`#` starts a comment); unknown keys are rejected.
struct RunConfig {
  // env.*
  std::string env_type = "four_rooms";  // four_rooms | minipac
  int grid_size = 11;
  int goal_row = 0;
  int goal_col = -1;  // -1 means grid_size - 1
  std::string layout_path;  // minipac; empty uses the built-in board
  std::string scheme = "eat";
  int pill_duration = 8;

  // policy.*
  std::string policy_type = "value_iteration";  // value_iteration | scripted
  double temperature = 0.1;
  double discount = 0.95;
  double vi_tolerance = 1e-8;
  int vi_max_iters = 10000;

  // ssx.*
  int k = 4;
  double eta = 1.0;
  double eps_phi = -1.0;  // <= 0: auto
  double lambda = 50.0;
  double eps_g = 0.1;
  double min_gain_ratio = 0.10;
  int max_strategic_per_meta = 0;  // 0 = unbounded
  int horizon = 0;                 // 0 = full enumeration, > 0 = local N-ball
  std::string horizon_unit = "turns";  // turns | moves
  double sample_fraction = 1.0;
  std::uint64_t seed = 1;
  int restarts = 5;
  bool normalize_counts = true;
  bool weighted_counts = false;
  std::string root = "start";  // "start" or an encoded state string
  int threads = 1;
  int max_states = 200000;

  // render.*
  int cell_px = 24;
  int strip_cell_px = 12;
  int samples_per_strip = 4;

  // eval.*
  std::vector<double> eval_fractions = {1.0, 0.75, 0.5, 0.25};
  std::vector<int> eval_n_values = {3, 4, 5, 6};
  int eval_n_max = 8;
  std::vector<int> eval_k_values = {2, 3, 4, 5, 6};
  int eval_roots = 3;
  int eval_rollout_steps = 12;
  int eval_n_perturbations = 10;
  int eval_n_food_removed = 3;
  int eval_growth_samples = 100;

  void set(const std::string& key, const std::string& value);
  void validate() const;

  /// All keys in sorted order with fixed number formatting; the config hash
  /// is the FNV-1a of this text.
  std::string canonical_text() const;
  std::string hash() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Built-in starting points: "four_rooms", "minipac_eat", "minipac_hunt".
RunConfig preset_config(const std::string& name);

std::uint64_t fnv1a_hash(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace ssx
