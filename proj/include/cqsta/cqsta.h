/* Copyright 2026 The cqsta Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the cqsta timing library.
 *
 * Objects are opaque handles released with their *_free function. Every
 * call returns a cqsta_status; on failure cqsta_last_error() describes the
 * problem for the calling thread until its next call into the library.
 * Strings returned through char** are owned by the caller and released with
 * cqsta_string_free. Times and slacks are in picoseconds. */

#ifndef CQSTA_CQSTA_H_
#define CQSTA_CQSTA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CQSTA_BUILDING_LIBRARY)
#define CQSTA_API __attribute__((visibility("default")))
#else
#define CQSTA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cqsta_status {
  CQSTA_OK = 0,
  CQSTA_ERR_ARGUMENT = 1,   /* null handle, bad option value */
  CQSTA_ERR_PARSE = 2,      /* malformed or unreadable input */
  CQSTA_ERR_INFEASIBLE = 3, /* no feasible period */
  CQSTA_ERR_LIMIT = 4,      /* solver or enumeration limit */
  CQSTA_ERR_DOMAIN = 5,     /* slack point outside the oracle domain */
  CQSTA_ERR_INTERNAL = 6
} cqsta_status;

typedef enum cqsta_format { CQSTA_FORMAT_TEXT = 0, CQSTA_FORMAT_JSON = 1 } cqsta_format;

typedef struct cqsta_settings cqsta_settings;
typedef struct cqsta_oracle cqsta_oracle;
typedef struct cqsta_model cqsta_model;
typedef struct cqsta_circuit cqsta_circuit;
typedef struct cqsta_solution cqsta_solution;

typedef struct cqsta_char_config {
  double anchor_slack;
  double k_th;
  double d_th;
  double search_resolution;
  double stable_step;
  double stable_epsilon;
  int max_split_depth;
} cqsta_char_config;

typedef struct cqsta_analytic_params {
  double d0;
  double amp_s;
  double amp_h;
  double tau_s;
  double tau_h;
  double f_bar;
  double domain_max;
} cqsta_analytic_params;

typedef struct cqsta_classic_params {
  double t_su;
  double t_h;
  double d_cq;
  double degradation_factor;
} cqsta_classic_params;

typedef struct cqsta_violations {
  size_t setup_paths;
  size_t setup_ffs;
  size_t hold_paths;
  size_t hold_ffs;
} cqsta_violations;

typedef struct cqsta_validation {
  double grid_resolution;
  double max_abs_error;
  double coverage_fraction;
  double worst_setup;
  double worst_hold;
  int64_t valid_points;
  int64_t covered_points;
} cqsta_validation;

typedef struct cqsta_random_spec {
  size_t n_ff;
  size_t n_stage;
  double dmax_lo;
  double dmax_hi;
  double dmin_frac_lo;
  double dmin_frac_hi;
  uint64_t seed;
} cqsta_random_spec;

typedef struct cqsta_optimize_options {
  int trim;                   /* nonzero enables trimming */
  int64_t node_limit;
  double gap_tolerance;       /* relative; 0 proves optimality */
  double time_limit_seconds;  /* 0 means none */
} cqsta_optimize_options;

typedef struct cqsta_working_point {
  int polygon;
  double s;
  double h;
  double d_cq;
} cqsta_working_point;

typedef struct cqsta_solution_info {
  double T;
  int optimal;   /* nonzero when optimality is proven */
  double gap;
  size_t n_ff;
  size_t n_ff_trimmed;
  size_t removed_stages;
  double avg_polygons;
  double t_floor;
  int64_t nodes;
  double runtime_seconds;
} cqsta_solution_info;

CQSTA_API const char* cqsta_version(void);
CQSTA_API const char* cqsta_last_error(void);
CQSTA_API void cqsta_string_free(char* s);

CQSTA_API void cqsta_char_config_default(cqsta_char_config* out);
CQSTA_API void cqsta_analytic_params_default(cqsta_analytic_params* out);
CQSTA_API void cqsta_random_spec_default(cqsta_random_spec* out);
CQSTA_API void cqsta_optimize_options_default(cqsta_optimize_options* out);

/* Run settings: flat `key = value` text. */
CQSTA_API cqsta_status cqsta_settings_parse(const char* text, cqsta_settings** out);
CQSTA_API cqsta_status cqsta_settings_load(const char* path, cqsta_settings** out);
CQSTA_API cqsta_status cqsta_settings_default(cqsta_settings** out);
CQSTA_API void cqsta_settings_free(cqsta_settings* s);
CQSTA_API cqsta_status cqsta_settings_char_config(const cqsta_settings* s, cqsta_char_config* out);
CQSTA_API cqsta_status cqsta_settings_set_char_config(cqsta_settings* s, const cqsta_char_config* cfg);
/* Sets *has to 1 and fills *out when t_su, t_h and d_cq are all given. */
CQSTA_API cqsta_status cqsta_settings_classic(const cqsta_settings* s, int* has, cqsta_classic_params* out);
/* The grid oracle when grid_file is set, the analytic oracle otherwise. */
CQSTA_API cqsta_status cqsta_settings_oracle(const cqsta_settings* s, cqsta_oracle** out);

CQSTA_API cqsta_status cqsta_oracle_analytic(const cqsta_analytic_params* p, cqsta_oracle** out);
CQSTA_API cqsta_status cqsta_oracle_grid_load(const char* path, double f_bar, cqsta_oracle** out);
CQSTA_API void cqsta_oracle_free(cqsta_oracle* o);
/* *valid is 0 for a metastable point, in which case *delay is untouched. */
CQSTA_API cqsta_status cqsta_oracle_query(const cqsta_oracle* o, double s, double h, int* valid, double* delay);

CQSTA_API cqsta_status cqsta_characterize(const cqsta_oracle* o, const cqsta_char_config* cfg, cqsta_model** out);
/* Raises d_th until the model has at most `target` polygons. */
CQSTA_API cqsta_status cqsta_characterize_to_target(const cqsta_oracle* o, const cqsta_char_config* cfg,
                                                    size_t target, cqsta_model** out, double* d_th);
CQSTA_API cqsta_status cqsta_model_parse(const char* text, cqsta_model** out);
CQSTA_API cqsta_status cqsta_model_load(const char* path, cqsta_model** out);
CQSTA_API cqsta_status cqsta_model_serialize(const cqsta_model* m, char** out);
CQSTA_API void cqsta_model_free(cqsta_model* m);
CQSTA_API size_t cqsta_model_polygon_count(const cqsta_model* m);
CQSTA_API int64_t cqsta_model_query_count(const cqsta_model* m);
CQSTA_API double cqsta_model_d_th(const cqsta_model* m);
CQSTA_API cqsta_status cqsta_model_validate(const cqsta_model* m, const cqsta_oracle* o, double grid_resolution,
                                            cqsta_validation* out);
CQSTA_API cqsta_status cqsta_render_validation(const cqsta_validation* v, double d_th, cqsta_format f, char** out);

/* Stage-file text, or a gate netlist when is_netlist is nonzero. */
CQSTA_API cqsta_status cqsta_circuit_parse(const char* text, int is_netlist, cqsta_circuit** out);
/* Reads a file; `.net` files are gate netlists, anything else stage files. */
CQSTA_API cqsta_status cqsta_circuit_load(const char* path, cqsta_circuit** out);
CQSTA_API cqsta_status cqsta_circuit_generate(const cqsta_random_spec* spec, cqsta_circuit** out);
CQSTA_API cqsta_status cqsta_circuit_serialize(const cqsta_circuit* c, char** out);
CQSTA_API void cqsta_circuit_free(cqsta_circuit* c);
CQSTA_API size_t cqsta_circuit_ff_count(const cqsta_circuit* c);
CQSTA_API size_t cqsta_circuit_stage_count(const cqsta_circuit* c);

CQSTA_API cqsta_status cqsta_classic_characterize(const cqsta_oracle* o, double degradation_factor,
                                                  const cqsta_char_config* cfg, cqsta_classic_params* out);
/* *no_stages is set when the circuit has no stages (T is then 0). */
CQSTA_API cqsta_status cqsta_classic_period(const cqsta_circuit* c, const cqsta_classic_params* p, double* T,
                                            int* no_stages);
CQSTA_API cqsta_status cqsta_count_violations(const cqsta_circuit* c, const cqsta_classic_params* p,
                                              double target_T, cqsta_violations* out);
CQSTA_API cqsta_status cqsta_render_classic(const cqsta_classic_params* p, double T, int no_stages,
                                            cqsta_format f, char** out);
CQSTA_API cqsta_status cqsta_render_violations(const cqsta_violations* v, double target_T, cqsta_format f,
                                               char** out);

CQSTA_API cqsta_status cqsta_optimize(const cqsta_circuit* c, const cqsta_model* m,
                                      const cqsta_optimize_options* opt, cqsta_solution** out);
CQSTA_API void cqsta_solution_free(cqsta_solution* s);
CQSTA_API cqsta_status cqsta_solution_info_get(const cqsta_solution* s, cqsta_solution_info* out);
CQSTA_API cqsta_status cqsta_solution_point(const cqsta_solution* s, size_t ff, cqsta_working_point* out);
/* Sets *ok; the failure list goes into the rendered report. */
CQSTA_API cqsta_status cqsta_solution_validate(cqsta_solution* s, const cqsta_circuit* c, const cqsta_model* m,
                                               const cqsta_oracle* o, int* ok);
CQSTA_API cqsta_status cqsta_render_solution(const cqsta_solution* s, const cqsta_circuit* c, cqsta_format f,
                                             char** out);

/* CPLEX LP text of the trimmed period problem. */
CQSTA_API cqsta_status cqsta_export_lp(const cqsta_circuit* c, const cqsta_model* m, int trim, char** out);

/* Comparison rows accumulate in a report and render as one table. */
typedef struct cqsta_compare_report cqsta_compare_report;
CQSTA_API cqsta_status cqsta_compare_report_new(cqsta_compare_report** out);
CQSTA_API void cqsta_compare_report_free(cqsta_compare_report* r);
CQSTA_API cqsta_status cqsta_compare_add(cqsta_compare_report* r, const char* name, const cqsta_circuit* c,
                                         const cqsta_model* m, const cqsta_oracle* o,
                                         const cqsta_char_config* cfg, const cqsta_optimize_options* opt);
CQSTA_API cqsta_status cqsta_compare_render(const cqsta_compare_report* r, cqsta_format f, char** out);

typedef struct cqsta_sweep_row {
  size_t target;
  size_t polygons;
  double d_th;
  double T;
  double runtime_seconds;
  int optimal;
} cqsta_sweep_row;
/* Re-solves with models coarsened to each target; `rows` holds n_targets. */
CQSTA_API cqsta_status cqsta_sweep(const cqsta_circuit* c, const cqsta_oracle* o, const cqsta_char_config* cfg,
                                   const size_t* targets, size_t n_targets, const cqsta_optimize_options* opt,
                                   cqsta_sweep_row* rows);
CQSTA_API cqsta_status cqsta_render_sweep(const cqsta_sweep_row* rows, size_t n, cqsta_format f, char** out);

#ifdef __cplusplus
}
#endif

#endif /* CQSTA_CQSTA_H_ */
