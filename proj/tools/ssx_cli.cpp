// ssx command-line driver. Links the C API only.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

#include "ssx/ssx.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir = "ssx_out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file (section.key = value)");
  cmd->add_option("--preset", opts.preset,
                  "built-in config: four_rooms | minipac_eat | minipac_hunt");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "seed override")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads, "worker thread cap");
  cmd->add_option("--set", opts.overrides, "extra key=value overrides")
      ->take_all();
}

int fail(ssx_status status) {
  std::fprintf(stderr, "error: %s\n", ssx_last_error());
  return static_cast<int>(status);
}

ssx_config* make_config(const CommonOpts& opts, ssx_status& status) {
  ssx_config* cfg = nullptr;
  if (!opts.config_path.empty())
    status = ssx_config_load(opts.config_path.c_str(), &cfg);
  else
    status = ssx_config_preset(opts.preset.empty() ? "four_rooms" : opts.preset.c_str(),
                               &cfg);
  if (status != SSX_OK) return nullptr;

  if (opts.seed_set) {
    status = ssx_config_set(cfg, "ssx.seed", std::to_string(opts.seed).c_str());
    if (status != SSX_OK) {
      ssx_config_free(cfg);
      return nullptr;
    }
  }
  if (opts.threads > 0) {
    status = ssx_config_set(cfg, "ssx.threads", std::to_string(opts.threads).c_str());
    if (status != SSX_OK) {
      ssx_config_free(cfg);
      return nullptr;
    }
  }
  for (const std::string& kv : opts.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      status = SSX_ERR_CONFIG;
      ssx_config_free(cfg);
      return nullptr;
    }
    status = ssx_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (status != SSX_OK) {
      ssx_config_free(cfg);
      return nullptr;
    }
  }
  return cfg;
}

void print_files(const ssx_result* res) {
  for (int i = 0; i < ssx_result_file_count(res); ++i)
    std::printf("wrote %s\n", ssx_result_file(res, i));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strategic-state explanations for discrete expert policies"};
  app.require_subcommand(1);

  CommonOpts explain_opts;
  CLI::App* explain = app.add_subcommand("explain", "run the full pipeline");
  add_common(explain, explain_opts);

  CommonOpts eval_opts;
  std::string study;
  CLI::App* eval = app.add_subcommand("eval", "run an evaluation study");
  add_common(eval, eval_opts);
  eval->add_option("--study", study,
                   "sampling | horizon | perturbation | growth | ksweep")
      ->required();

  CommonOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "value-iteration policy cache");
  add_common(train, train_opts);

  std::string render_in, render_out = "explanation.svg";
  CLI::App* render = app.add_subcommand("render", "re-render an explanation JSON");
  render->add_option("--in", render_in, "explanation.json path")->required();
  render->add_option("--out", render_out, "output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help/usage text
    return rc == 0 ? 0 : static_cast<int>(SSX_ERR_CONFIG);
  }

  if (render->parsed()) {
    const ssx_status status = ssx_render_file(render_in.c_str(), render_out.c_str());
    if (status != SSX_OK) return fail(status);
    std::printf("wrote %s\n", render_out.c_str());
    return 0;
  }

  const CommonOpts& opts = explain->parsed()  ? explain_opts
                           : eval->parsed()   ? eval_opts
                                              : train_opts;
  ssx_status status = SSX_OK;
  ssx_config* cfg = make_config(opts, status);
  if (!cfg) return fail(status);

  ssx_result* res = nullptr;
  if (explain->parsed())
    status = ssx_explain(cfg, opts.out_dir.c_str(), &res);
  else if (eval->parsed())
    status = ssx_eval(cfg, study.c_str(), opts.out_dir.c_str(), &res);
  else
    status = ssx_train(cfg, opts.out_dir.c_str(), &res);

  int rc = 0;
  if (status != SSX_OK) {
    rc = fail(status);
  } else {
    print_files(res);
    if (eval->parsed() || train->parsed())
      std::printf("%s", ssx_result_json(res));
  }
  ssx_result_free(res);
  ssx_config_free(cfg);
  return rc;
}
