/* ssx: strategic-state explanations for discrete expert policies.
 *
 * C interface to the ssx shared library. All functions return an ssx_status;
 * on failure ssx_last_error() describes what went wrong (thread-local).
 * Handles are opaque and must be released with the matching *_free call.
 */
#ifndef SSX_H
#define SSX_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssx_status {
  SSX_OK = 0,
  SSX_ERR_BADARG = 1,
  SSX_ERR_CONFIG = 2,   /* invalid configuration or layout */
  SSX_ERR_PIPELINE = 3  /* any failure while running the pipeline */
} ssx_status;

typedef struct ssx_config ssx_config;
typedef struct ssx_result ssx_result;

const char* ssx_version(void);

/* Last error message of the current thread; empty string when none. */
const char* ssx_last_error(void);

/* --- configuration ------------------------------------------------------ */

/* Built-in presets: "four_rooms", "minipac_eat", "minipac_hunt". */
ssx_status ssx_config_preset(const char* name, ssx_config** out);

/* Parse a `section.key = value` config file. */
ssx_status ssx_config_load(const char* path, ssx_config** out);

/* Override one key, e.g. ssx_config_set(cfg, "ssx.seed", "7"). */
ssx_status ssx_config_set(ssx_config* cfg, const char* key, const char* value);

void ssx_config_free(ssx_config* cfg);

/* --- runs ----------------------------------------------------------------*/

/* Full pipeline; writes explanation.json, explanation.svg and manifest.json
 * under out_dir. result (optional) receives the explanation JSON. */
ssx_status ssx_explain(const ssx_config* cfg, const char* out_dir,
                       ssx_result** result);

/* Evaluation studies: "sampling", "horizon", "perturbation", "growth",
 * "ksweep". Writes CSV/SVG artifacts under out_dir. */
ssx_status ssx_eval(const ssx_config* cfg, const char* study, const char* out_dir,
                    ssx_result** result);

/* Value-iteration policy/value cache; writes policy.json under out_dir. */
ssx_status ssx_train(const ssx_config* cfg, const char* out_dir,
                     ssx_result** result);

/* Re-render an SVG from a previously written explanation JSON. */
ssx_status ssx_render_file(const char* explanation_json_path,
                           const char* out_svg_path);

/* --- results -------------------------------------------------------------*/

/* JSON text of the run (explanation or study summary). Owned by the result. */
const char* ssx_result_json(const ssx_result* result);

int ssx_result_file_count(const ssx_result* result);
const char* ssx_result_file(const ssx_result* result, int index);

void ssx_result_free(ssx_result* result);

#ifdef __cplusplus
}
#endif

#endif /* SSX_H */
