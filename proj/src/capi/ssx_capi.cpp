#include "ssx/ssx.h"

#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/pipeline.hpp"

struct ssx_config {
  ssx::RunConfig cfg;
};

struct ssx_result {
  ssx::PipelineResult res;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

ssx_status map_exception() {
  try {
    throw;
  } catch (const ssx::ConfigError& e) {
    set_error(e.what());
    return SSX_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SSX_ERR_PIPELINE;
  } catch (...) {
    set_error("unknown error");
    return SSX_ERR_PIPELINE;
  }
}

ssx_status store_result(ssx::PipelineResult&& res, ssx_result** out) {
  if (out) *out = new ssx_result{std::move(res)};
  g_last_error.clear();
  return SSX_OK;
}

}  // namespace

extern "C" {

const char* ssx_version(void) { return "0.1.0"; }

const char* ssx_last_error(void) { return g_last_error.c_str(); }

ssx_status ssx_config_preset(const char* name, ssx_config** out) {
  if (!name || !out) {
    set_error("null argument");
    return SSX_ERR_BADARG;
  }
  try {
    *out = new ssx_config{ssx::preset_config(name)};
    g_last_error.clear();
    return SSX_OK;
  } catch (...) {
    return map_exception();
  }
}

ssx_status ssx_config_load(const char* path, ssx_config** out) {
  if (!path || !out) {
    set_error("null argument");
    return SSX_ERR_BADARG;
  }
  try {
    *out = new ssx_config{ssx::load_config_file(path)};
    g_last_error.clear();
    return SSX_OK;
  } catch (...) {
    return map_exception();
  }
}

ssx_status ssx_config_set(ssx_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) {
    set_error("null argument");
    return SSX_ERR_BADARG;
  }
  try {
    ssx::RunConfig updated = cfg->cfg;  // reject without mutating
    updated.set(key, value);
    updated.validate();
    cfg->cfg = std::move(updated);
    g_last_error.clear();
    return SSX_OK;
  } catch (...) {
    return map_exception();
  }
}

void ssx_config_free(ssx_config* cfg) { delete cfg; }

ssx_status ssx_explain(const ssx_config* cfg, const char* out_dir,
                       ssx_result** result) {
  if (!cfg || !out_dir) {
    set_error("null argument");
    return SSX_ERR_BADARG;
  }
  try {
    return store_result(ssx::run_explain(cfg->cfg, out_dir), result);
  } catch (...) {
    return map_exception();
  }
}

ssx_status ssx_eval(const ssx_config* cfg, const char* study, const char* out_dir,
                    ssx_result** result) {
  if (!cfg || !study || !out_dir) {
    set_error("null argument");
    return SSX_ERR_BADARG;
  }
  try {
    return store_result(ssx::run_eval(cfg->cfg, study, out_dir), result);
  } catch (...) {
    return map_exception();
  }
}

ssx_status ssx_train(const ssx_config* cfg, const char* out_dir,
                     ssx_result** result) {
  if (!cfg || !out_dir) {
    set_error("null argument");
    return SSX_ERR_BADARG;
  }
  try {
    return store_result(ssx::run_train(cfg->cfg, out_dir), result);
  } catch (...) {
    return map_exception();
  }
}

ssx_status ssx_render_file(const char* explanation_json_path,
                           const char* out_svg_path) {
  if (!explanation_json_path || !out_svg_path) {
    set_error("null argument");
    return SSX_ERR_BADARG;
  }
  try {
    ssx::run_render_file(explanation_json_path, out_svg_path);
    g_last_error.clear();
    return SSX_OK;
  } catch (...) {
    return map_exception();
  }
}

const char* ssx_result_json(const ssx_result* result) {
  return result ? result->res.summary.c_str() : "";
}

int ssx_result_file_count(const ssx_result* result) {
  return result ? static_cast<int>(result->res.files.size()) : 0;
}

const char* ssx_result_file(const ssx_result* result, int index) {
  if (!result || index < 0 ||
      index >= static_cast<int>(result->res.files.size()))
    return "";
  return result->res.files[static_cast<std::size_t>(index)].c_str();
}

void ssx_result_free(ssx_result* result) { delete result; }

}  // extern "C"
