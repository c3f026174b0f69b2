#ifndef CURRICULUM_CURRICULUM_H
#define CURRICULUM_CURRICULUM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CURRICULUM_BUILDING_LIBRARY)
#    define CUR_API __declspec(dllexport)
#  else
#    define CUR_API __declspec(dllimport)
#  endif
#else
#  define CUR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one; on failure the message is
 * available from cur_last_error() on the calling thread. */
typedef enum cur_status {
  CUR_OK = 0,
  CUR_E_INVALID_ARGUMENT = 1,
  CUR_E_PARSE_ERROR = 2,
  CUR_E_IO_ERROR = 3,
  CUR_E_MALFORMED_RECORD = 4,
  CUR_E_MALFORMED_FILE = 5,
  CUR_E_LEXICON_MISSING = 6,
  CUR_E_CHECKSUM_MISMATCH = 7,
  CUR_E_COUNT_MISMATCH = 8,
  CUR_E_UNKNOWN_OPERATION = 9,
  CUR_E_INPUT_OUTSIDE_DOMAIN = 10,
  CUR_E_CHAIN_DOMAIN_ERROR = 11,
  CUR_E_NOT_ENOUGH_INSTANCES = 12,
  CUR_E_TOO_FEW_POINTS = 13,
  CUR_E_EMPTY_SERIES = 14,
  CUR_E_TOO_FEW_SHARED_TASKS = 15,
  CUR_E_ZERO_VECTOR = 16,
  CUR_E_DIMENSION_MISMATCH = 17,
  CUR_E_TOO_FEW_PROMPTS = 18,
  CUR_E_SOLVE_FAILURE = 19,
  CUR_E_EMPTY_BASIS = 20,
  CUR_E_MISSING_FV = 21,
  CUR_E_INVALID_PARAMS = 22,
  CUR_E_INTERNAL = 23
} cur_status;

typedef struct cur_suite cur_suite;
typedef struct cur_store cur_store;
typedef struct cur_emergence cur_emergence;
typedef struct cur_fvec cur_fvec;

CUR_API const char* cur_version(void);
CUR_API const char* cur_status_name(cur_status status);
/* Message of the last failed call on this thread; "" when none. */
CUR_API const char* cur_last_error(void);
/* Chain position or line number attached to the last error, or -1. */
CUR_API long cur_last_error_position(void);
/* "debug", "info", "warn", "error" or "off". */
CUR_API cur_status cur_set_log_level(const char* level);
/* Releases strings returned through char** out-parameters. */
CUR_API void cur_string_free(char* s);

/* ---- operations and scoring ---- */

/* Applies an operation chain to one input. *out_json receives a JSON array
 * of accepted outputs. data_dir may be NULL for the installed lexicons. */
CUR_API cur_status cur_compose(const char* data_dir, const char* const* chain, size_t n_ops, const char* input,
                               char** out_json);
/* *out_correct is 1 when the normalized prediction equals any gold. */
CUR_API cur_status cur_score_exact_match(const char* prediction, const char* const* golds, size_t n_golds,
                                         int* out_correct);

/* ---- task suite ---- */

typedef struct cur_suite_options {
  const char* data_dir;     /* NULL: installed lexicons */
  uint64_t seed;
  const char* include;      /* comma-separated categories, NULL for all */
  const char* frct_items;   /* JSONL of externally supplied FRCT items, or NULL */
  int diacritic_aliases;
} cur_suite_options;

CUR_API void cur_suite_options_init(cur_suite_options* options);
CUR_API cur_status cur_suite_build(const cur_suite_options* options, cur_suite** out);
CUR_API cur_status cur_suite_load(const char* dir, cur_suite** out);
CUR_API cur_status cur_suite_write(const cur_suite* suite, const char* dir);
CUR_API size_t cur_suite_task_count(const cur_suite* suite);
CUR_API size_t cur_suite_composite_count(const cur_suite* suite);
CUR_API size_t cur_suite_edge_count(const cur_suite* suite);
CUR_API size_t cur_suite_instance_count(const cur_suite* suite);
CUR_API cur_status cur_suite_manifest_json(const cur_suite* suite, char** out_json);
/* Instances of one task as a JSON array of {input, golds}. */
CUR_API cur_status cur_suite_instances_json(const cur_suite* suite, const char* task_id, char** out_json);
CUR_API cur_status cur_suite_render_prompt(const cur_suite* suite, const char* task_id, size_t query_index,
                                           size_t n_shots, uint64_t seed, char** out_prompt);
CUR_API void cur_suite_free(cur_suite* suite);

/* ---- trajectory store ---- */

CUR_API cur_status cur_store_ingest(const char* const* files, size_t n_files, cur_store** out);
CUR_API cur_status cur_store_open(const char* dir, cur_store** out);
CUR_API cur_status cur_store_save(const cur_store* store, const char* dir);
CUR_API size_t cur_store_model_count(const cur_store* store);
CUR_API size_t cur_store_series_count(const cur_store* store);
CUR_API size_t cur_store_point_count(const cur_store* store);
CUR_API size_t cur_store_warning_count(const cur_store* store);
CUR_API void cur_store_free(cur_store* store);

/* ---- emergence ---- */

typedef struct cur_definition {
  int relative;        /* 0: absolute threshold, 1: fraction of the task maximum */
  double threshold;
  size_t stability_k;
} cur_definition;

CUR_API cur_status cur_definition_parse(const char* text, cur_definition* out);
/* horizon may be NULL: per-model last checkpoint. */
CUR_API cur_status cur_emergence_compute(const cur_store* store, const char* const* definitions, size_t n_definitions,
                                         const double* horizon, cur_emergence** out);
CUR_API cur_status cur_emergence_read(const char* path, cur_emergence** out);
CUR_API cur_status cur_emergence_write(const cur_emergence* emergence, const char* path);
CUR_API size_t cur_emergence_count(const cur_emergence* emergence);
CUR_API size_t cur_emergence_emerged_count(const cur_emergence* emergence);
CUR_API void cur_emergence_free(cur_emergence* emergence);

/* Analyses write their artifact to out_path and return a JSON summary.
 * definition may be NULL: every definition (correlate) or the first one
 * (heatmap). */
CUR_API cur_status cur_correlate(const cur_emergence* emergence, const char* definition, const char* out_path,
                                 char** out_summary);
CUR_API cur_status cur_violations(const cur_emergence* emergence, const char* manifest_path, const char* out_path,
                                  char** out_summary);
CUR_API cur_status cur_heatmap_data(const cur_emergence* emergence, const char* definition, const char* out_path,
                                    char** out_summary);

CUR_API cur_status cur_spearman(const double* a, const double* b, size_t n, double* out_rho, double* out_p);

/* ---- function vectors ---- */

/* metadata_json: {model_id, task_id, extraction, layer, heads, n_correct_prompts,
 * checkpoint_tokens_b[, prompt_index]}. */
CUR_API cur_status cur_fvec_create(const float* values, size_t dim, const char* metadata_json, cur_fvec** out);
CUR_API cur_status cur_fvec_read(const char* path, cur_fvec** out);
CUR_API cur_status cur_fvec_write(const cur_fvec* fv, const char* path);
CUR_API size_t cur_fvec_dim(const cur_fvec* fv);
CUR_API const float* cur_fvec_data(const cur_fvec* fv);
CUR_API cur_status cur_fvec_metadata_json(const cur_fvec* fv, char** out_json);
CUR_API void cur_fvec_free(cur_fvec* fv);

/* ---- calibration and prediction ---- */

typedef struct cur_calibrate_options {
  const char* fvs;          /* FVEC file or directory */
  const char* candidates;   /* JSON candidate list */
  const char* manifest;     /* NULL: built-in catalog edges */
  const char* out;
  uint64_t seed;
} cur_calibrate_options;

CUR_API void cur_calibrate_options_init(cur_calibrate_options* options);
CUR_API cur_status cur_calibrate(const cur_calibrate_options* options, char** out_summary);

typedef struct cur_predict_options {
  const char* store;
  const char* fvs;
  const char* config;       /* kernel config or presets JSON; NULL: installed presets */
  const char* condition;    /* "all", "simple" or "both" */
  const char* out;          /* reports directory */
  const char* model;        /* NULL: every model in the store */
  const char* targets;      /* comma-separated held-out tasks; NULL: composites */
  int tune;                 /* nonzero: grid-search sigma_k and lambda first */
  double smooth_sigma;
  double epsilon;
} cur_predict_options;

CUR_API void cur_predict_options_init(cur_predict_options* options);
CUR_API cur_status cur_predict(const cur_predict_options* options, char** out_summary);

typedef struct cur_simulate_options {
  uint64_t seed;
  size_t n_tasks;
  size_t n_models;
  size_t n_checkpoints;
  size_t dim;
  double traj_noise;
  double fv_noise;
  double t_min;
  double t_max;
  double inversion_shift;
  double model_jitter;
  int inversion;            /* nonzero: plant composites ahead of their parents */
  const char* out;
} cur_simulate_options;

CUR_API void cur_simulate_options_init(cur_simulate_options* options);
CUR_API cur_status cur_simulate(const cur_simulate_options* options, char** out_summary);

#ifdef __cplusplus
}
#endif

#endif
