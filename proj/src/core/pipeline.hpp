#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/ssxrun.hpp"

namespace ssx {

struct PipelineResult {
  std::string summary;             // JSON text (the explanation itself for explain)
  std::vector<std::string> files;  // files written, in order
};

std::shared_ptr<Env> build_env(const RunConfig& cfg);
std::shared_ptr<Policy> build_policy(const RunConfig& cfg,
                                     const std::shared_ptr<Env>& env);
SsxParams ssx_params_from(const RunConfig& cfg);
GridState resolve_root(const RunConfig& cfg, const Env& env);

std::string explanation_to_json(const RunConfig& cfg, const Env& env,
                                const SsxOutcome& outcome);

/// explain: run the full pipeline and write explanation.json, explanation.svg
/// and manifest.json under out_dir.
PipelineResult run_explain(const RunConfig& cfg, const std::string& out_dir);

/// train: run value iteration and write the tabular policy/value cache.
PipelineResult run_train(const RunConfig& cfg, const std::string& out_dir);

/// eval: one of sampling | horizon | perturbation | growth | ksweep.
/// Writes CSV and SVG artifacts plus a manifest; returns a JSON summary.
PipelineResult run_eval(const RunConfig& cfg, const std::string& study,
                        const std::string& out_dir);

/// render: re-render an SVG from a previously written explanation JSON.
PipelineResult run_render_file(const std::string& explanation_json_path,
                               const std::string& out_svg_path);

}  // namespace ssx
