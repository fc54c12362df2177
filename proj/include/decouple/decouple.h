/* Copyright 2026 The decouple Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DECOUPLE_DECOUPLE_H_
#define DECOUPLE_DECOUPLE_H_

/* C interface to the decoupling library.
 *
 * All handles are opaque and owned by the caller; release them with the
 * matching *_free function. Functions returning dcp_status store a message
 * retrievable with dcp_last_error() on failure (per thread). Player indices
 * are 1-based throughout. Strings returned through char** are allocated by
 * the library and released with dcp_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(DCP_BUILDING_LIBRARY)
#define DCP_API __attribute__((visibility("default")))
#else
#define DCP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dcp_status {
  DCP_OK = 0,
  DCP_ERR_INVALID_ARGUMENT = 1,
  DCP_ERR_DIMENSION_MISMATCH = 2,
  DCP_ERR_SINGULAR_JACOBIAN = 3,
  DCP_ERR_STEP_SIZE_RULE = 4,
  DCP_ERR_ENUMERATION_CAP = 5,
  DCP_ERR_NOT_POTENTIAL_GAME = 6,
  DCP_ERR_DIVERGENCE = 7,
  DCP_ERR_PARSE = 8,
  DCP_ERR_IO = 9,
  DCP_ERR_INTERNAL = 10
} dcp_status;

typedef enum dcp_method {
  DCP_METHOD_ALGEBRAIC = 0,
  DCP_METHOD_PATHS = 1,
  DCP_METHOD_EXACT = 2
} dcp_method;

typedef enum dcp_emit_kind { DCP_EMIT_GRAPH = 0, DCP_EMIT_GAME = 1 } dcp_emit_kind;

typedef enum dcp_disturbance_kind {
  DCP_DISTURB_ZERO = 0,
  DCP_DISTURB_CONSTANT = 1,
  DCP_DISTURB_IMPULSE = 2,
  DCP_DISTURB_UNIFORM = 3
} dcp_disturbance_kind;

typedef enum dcp_run { DCP_RUN_CLEAN = 0, DCP_RUN_CORRUPTED = 1 } dcp_run;

typedef struct dcp_disturbance {
  int player; /* 1-based */
  dcp_disturbance_kind kind;
  /* DCP_DISTURB_UNIFORM: ||d^k|| <= bound, drawn from seed. */
  double bound;
  uint64_t seed;
  /* DCP_DISTURB_IMPULSE: iteration at which value is applied. */
  int step;
  /* DCP_DISTURB_CONSTANT / IMPULSE: the player's block, value_len entries. */
  const double* value;
  size_t value_len;
} dcp_disturbance;

typedef struct dcp_model dcp_model;
typedef struct dcp_report dcp_report;
typedef struct dcp_sim dcp_sim;

DCP_API const char* dcp_status_string(dcp_status status);
DCP_API const char* dcp_last_error(void);
DCP_API void dcp_string_free(char* s);

/* ---- models ---------------------------------------------------------- */

/* path "-" reads standard input. */
DCP_API dcp_status dcp_model_load_file(const char* path, dcp_model** out);
DCP_API dcp_status dcp_model_load_string(const char* text, const char* source_name,
                                         dcp_model** out);
/* W is n x n row-major, n = sum(dims); gamma has num_players entries;
 * offset (n entries) may be NULL for zero. */
DCP_API dcp_status dcp_model_from_adjacency(int num_players, const int* dims,
                                            const double* w, const double* gamma,
                                            const double* offset, dcp_model** out);
DCP_API void dcp_model_free(dcp_model* model);

DCP_API int dcp_model_num_players(const dcp_model* model);
DCP_API int dcp_model_total_dim(const dcp_model* model);
/* "quadratic", "lq", "bilinear" or "graph". */
DCP_API const char* dcp_model_kind(const dcp_model* model);
DCP_API double dcp_model_tolerance(const dcp_model* model);
DCP_API uint64_t dcp_model_seed(const dcp_model* model);
/* Human-readable notes about the model (e.g. asymmetric self blocks), one per
 * line; empty when there is nothing to report. */
DCP_API dcp_status dcp_model_warnings(const dcp_model* model, char** out);

/* ---- analysis -------------------------------------------------------- */

/* tolerance <= 0 uses the model's tolerance. DCP_METHOD_EXACT ignores it. */
DCP_API dcp_status dcp_analyze_pair(const dcp_model* model, int source, int target,
                                    dcp_method method, double tolerance,
                                    dcp_report** out);
DCP_API dcp_status dcp_analyze_all(const dcp_model* model, dcp_method method,
                                   double tolerance, dcp_report** out);
DCP_API void dcp_report_free(dcp_report* report);

DCP_API size_t dcp_report_count(const dcp_report* report);
/* 1 when every entry is decoupled. */
DCP_API int dcp_report_all_decoupled(const dcp_report* report);
/* first_failing is 0 when the entry is decoupled. Any out pointer may be NULL. */
DCP_API dcp_status dcp_report_entry(const dcp_report* report, size_t index, int* source,
                                    int* target, int* decoupled, int* first_failing);
/* Entry k (0-based) refers to the power W^{k+1}. */
DCP_API size_t dcp_report_num_powers(const dcp_report* report, size_t index);
DCP_API dcp_status dcp_report_residual(const dcp_report* report, size_t index, size_t k,
                                       double* residual, double* normalizer);
/* Stamps every entry with a wall time, serialized as runtimeMs. */
DCP_API void dcp_report_set_runtime(dcp_report* report, double runtime_ms);
DCP_API dcp_status dcp_report_to_json(const dcp_report* report, char** out);
DCP_API dcp_status dcp_report_from_json(const char* json, dcp_report** out);

/* ---- game-level quantities ------------------------------------------- */

/* Writes total_dim entries to action. rcond may be NULL. */
DCP_API dcp_status dcp_nash(const dcp_model* model, double* action, size_t capacity,
                            double* rcond);
/* Uniform step size from the game Jacobian; alpha and beta may be NULL. */
DCP_API dcp_status dcp_stepsize(const dcp_model* model, double* gamma, double* alpha,
                                double* beta);
DCP_API dcp_status dcp_emit(const dcp_model* model, dcp_emit_kind kind, char** out);

/* ---- simulation ------------------------------------------------------ */

/* Clean and corrupted runs from the model's x0. A diverging corrupted run is
 * kept up to its last finite iterate (dcp_sim_diverged reports 1); a
 * diverging clean run is an error. */
DCP_API dcp_status dcp_simulate(const dcp_model* model, int steps,
                                const dcp_disturbance* disturbance, dcp_sim** out);
/* One seeded uniform run per bound; bounds must be nondecreasing.
 * max_threads <= 0 means 1. */
DCP_API dcp_status dcp_sweep(const dcp_model* model, int steps, int player,
                             const double* bounds, size_t num_bounds, uint64_t seed,
                             int max_threads, dcp_sim** out);
DCP_API void dcp_sim_free(dcp_sim* sim);

/* Number of deviation reports: 1 for dcp_simulate, one per bound otherwise. */
DCP_API size_t dcp_sim_num_points(const dcp_sim* sim);
DCP_API int dcp_sim_num_players(const dcp_sim* sim);
DCP_API int dcp_sim_diverged(const dcp_sim* sim, size_t point);
DCP_API dcp_status dcp_sim_deviation(const dcp_sim* sim, size_t point, int player,
                                     double* max_deviation, double* rel_deviation);
/* JSON deviation report. */
DCP_API dcp_status dcp_sim_to_json(const dcp_sim* sim, char** out);
/* CSV with header k,player,coord,value (dcp_simulate results only). */
DCP_API dcp_status dcp_sim_trajectory_csv(const dcp_sim* sim, dcp_run run, char** out);
/* CSV with header k,player,clean,corrupted (dcp_simulate results only). */
DCP_API dcp_status dcp_sim_costs_csv(const dcp_sim* sim, char** out);
/* CSV with header bound,player,maxDeviation,relDeviation. */
DCP_API dcp_status dcp_sim_sweep_csv(const dcp_sim* sim, char** out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* DECOUPLE_DECOUPLE_H_ */
