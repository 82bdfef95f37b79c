/*
 *   Copyright 2026 The elmasm Authors
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

#ifndef ELMASM_ELMASM_H
#define ELMASM_ELMASM_H

/*
 * C interface of the element-matrix assembly mini-app.
 *
 * All objects are opaque handles created by an elmasm_*_create / producing
 * call and released with the matching *_destroy function. Every fallible
 * call returns an elmasm_status; on failure a human-readable message for the
 * calling thread is available from elmasm_last_error() until the next call
 * on that thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ELMASM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define ELMASM_API __attribute__((visibility("default")))
#else
#define ELMASM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elmasm_status {
  ELMASM_OK = 0,
  ELMASM_ERR_INVALID_ARGUMENT = 1,
  ELMASM_ERR_INVALID_CONFIG = 2,
  ELMASM_ERR_IO = 3,
  ELMASM_ERR_VERIFICATION = 4,
  ELMASM_ERR_INTERNAL = 5
} elmasm_status;

typedef enum elmasm_strategy {
  ELMASM_CRITICAL_ALL = 0,
  ELMASM_ATOMIC = 1,
  ELMASM_BUFFERED_CRITICAL = 2,
  ELMASM_ALIGNED_CRITICAL = 3,
  ELMASM_COLORED = 4
} elmasm_strategy;

typedef enum elmasm_variant {
  ELMASM_ORIG = 0,
  ELMASM_MP1 = 1,
  ELMASM_MP2 = 2,
  ELMASM_MP3 = 3,
  ELMASM_MSMT = 4
} elmasm_variant;

typedef enum elmasm_mode {
  ELMASM_SEPARATE_NESTS = 0,
  ELMASM_MERGED_TRANSPOSED = 1,
  ELMASM_MERGED_CHUNKED = 2
} elmasm_mode;

typedef enum elmasm_figure {
  ELMASM_FIGURE_STRONG = 0,
  ELMASM_FIGURE_WEAK = 1
} elmasm_figure;

typedef struct elmasm_config elmasm_config;
typedef struct elmasm_matrix elmasm_matrix;
typedef struct elmasm_records elmasm_records;
typedef struct elmasm_report elmasm_report;

/* Message describing the last failure on the calling thread ("" if none). */
ELMASM_API const char* elmasm_last_error(void);
ELMASM_API const char* elmasm_version(void);

/* Name <-> enum conversion. Parsing is case-insensitive. */
ELMASM_API const char* elmasm_strategy_name(elmasm_strategy strategy);
ELMASM_API const char* elmasm_variant_name(elmasm_variant variant);
ELMASM_API const char* elmasm_mode_name(elmasm_mode mode);
ELMASM_API elmasm_status elmasm_parse_strategy(const char* name, elmasm_strategy* out);
ELMASM_API elmasm_status elmasm_parse_variant(const char* name, elmasm_variant* out);
ELMASM_API elmasm_status elmasm_parse_mode(const char* name, elmasm_mode* out);

/* ---- configuration ------------------------------------------------------ */

/* Presets: "paper" and "desk". */
ELMASM_API elmasm_status elmasm_config_create(const char* preset, elmasm_config** out);
ELMASM_API elmasm_status elmasm_config_clone(const elmasm_config* config, elmasm_config** out);
ELMASM_API void elmasm_config_destroy(elmasm_config* config);

/* key=value setting with the same keys as the config file format. */
ELMASM_API elmasm_status elmasm_config_set(elmasm_config* config, const char* key, const char* value);
ELMASM_API elmasm_status elmasm_config_get_int(const elmasm_config* config, const char* key, int64_t* out);
ELMASM_API elmasm_status elmasm_config_load_file(elmasm_config* config, const char* path);
/* Returns ELMASM_ERR_INVALID_CONFIG naming the violated invariant. */
ELMASM_API elmasm_status elmasm_config_validate(const elmasm_config* config);

typedef struct elmasm_sizes {
  int64_t block_dim;
  int64_t n_harm;
  int64_t elm_side;
  int64_t block_bytes; /* one of the four per-plane temporaries */
  int64_t elm_bytes;   /* dense element matrix */
  int64_t slice_bytes; /* one kl-slice of a temporary */
  int64_t chunk_count;
} elmasm_sizes;

ELMASM_API elmasm_status elmasm_derive_sizes(const elmasm_config* config, elmasm_sizes* out);
ELMASM_API elmasm_status elmasm_arithmetic_intensity(int64_t n_plane, double* out);

/* ---- assembly ----------------------------------------------------------- */

typedef struct elmasm_phase_times {
  double compute_ms;
  double transform_ms;
  double scatter_ms;
  double wall_ms;
  int32_t threads;
} elmasm_phase_times;

typedef struct elmasm_checksum {
  double magnitude;    /* sum of |values| rounded to 12 significant digits */
  uint64_t index_hash; /* order-independent hash of the (row, col) pairs */
} elmasm_checksum;

ELMASM_API elmasm_status elmasm_assemble(const elmasm_config* config, elmasm_variant variant, elmasm_mode mode,
                                         elmasm_strategy strategy, int32_t threads, elmasm_matrix** out);
ELMASM_API void elmasm_matrix_destroy(elmasm_matrix* matrix);

ELMASM_API elmasm_status elmasm_matrix_info(const elmasm_matrix* matrix, int64_t* dof_count, int64_t* nnz);
ELMASM_API elmasm_status elmasm_matrix_times(const elmasm_matrix* matrix, elmasm_phase_times* out);
ELMASM_API elmasm_status elmasm_matrix_checksum(const elmasm_matrix* matrix, elmasm_checksum* out);
/* Writes "<magnitude>:<hash>" into buf (NUL-terminated, truncated to size). */
ELMASM_API elmasm_status elmasm_checksum_format(const elmasm_checksum* checksum, char* buf, size_t size);

/* Canonical triplets of both matrices: identical index sets and the
 * normwise relative value deviation. */
ELMASM_API elmasm_status elmasm_matrix_compare(const elmasm_matrix* candidate, const elmasm_matrix* reference,
                                               int32_t* same_indices, double* max_relative);

/* MatrixMarket coordinate real general, 1-based, sorted by (row, col). */
ELMASM_API elmasm_status elmasm_matrix_write_market(const elmasm_matrix* matrix, const char* path);

/* ---- pipeline ----------------------------------------------------------- */

typedef struct elmasm_pipeline_config {
  int32_t construct_threads;
  int32_t max_solver_threads;
  int32_t solve_sweeps;
  int64_t factor_work;
} elmasm_pipeline_config;

typedef struct elmasm_timestep {
  int32_t construct_threads; /* workers observed during construction */
  int32_t solver_threads;    /* workers observed during factor / solve */
  elmasm_phase_times construct;
  double factor_ms;
  double solve_ms;
  double total_ms;
  uint64_t factor_work_units;
  double solve_norm;
  elmasm_checksum checksum;
} elmasm_timestep;

/* Defaults; max_solver_threads is taken from the problem config. */
ELMASM_API elmasm_status elmasm_pipeline_defaults(const elmasm_config* config, elmasm_pipeline_config* out);

/* `records` (nullable) receives one record per phase; `matrix` (nullable)
 * receives the assembled matrix. */
ELMASM_API elmasm_status elmasm_run_timestep(const elmasm_config* config, const elmasm_pipeline_config* pipeline,
                                             elmasm_strategy strategy, elmasm_variant variant, elmasm_mode mode,
                                             elmasm_timestep* out, elmasm_records* records,
                                             elmasm_matrix** matrix);

/* ---- benchmark records -------------------------------------------------- */

typedef struct elmasm_sweep {
  const int32_t* threads;
  size_t thread_count;
  const elmasm_strategy* strategies;
  size_t strategy_count;
  const elmasm_variant* variants;
  size_t variant_count;
  const elmasm_mode* modes;
  size_t mode_count;
  int32_t repeats;
} elmasm_sweep;

ELMASM_API elmasm_status elmasm_records_create(elmasm_records** out);
ELMASM_API void elmasm_records_destroy(elmasm_records* records);
ELMASM_API size_t elmasm_records_size(const elmasm_records* records);

/* Appends to `records`. */
ELMASM_API elmasm_status elmasm_run_strong_scaling(const elmasm_config* config, const elmasm_sweep* sweep,
                                                   elmasm_records* records);
ELMASM_API elmasm_status elmasm_run_weak_scaling(const elmasm_config* config, const elmasm_sweep* sweep,
                                                 elmasm_records* records);

typedef struct elmasm_record_view {
  const char* run_id;
  const char* preset;
  const char* phase;
  elmasm_strategy strategy;
  elmasm_variant variant;
  elmasm_mode mode;
  int32_t construct_threads;
  int32_t solver_threads;
  int32_t mesh_nx;
  int32_t mesh_ny;
  int32_t repetitions;
  double median_ms;
  double min_ms;
  const char* checksum;
} elmasm_record_view;

/* Pointers stay valid until `records` is modified or destroyed. */
ELMASM_API elmasm_status elmasm_records_get(const elmasm_records* records, size_t index, elmasm_record_view* out);

/* Empty record lists are rejected and no file is created. */
ELMASM_API elmasm_status elmasm_records_write_csv(const elmasm_records* records, const char* path);
ELMASM_API elmasm_status elmasm_records_write_json(const elmasm_records* records, const char* path);
ELMASM_API elmasm_status elmasm_records_read_csv(const char* path, elmasm_records** out);
ELMASM_API elmasm_status elmasm_records_read_json(const char* path, elmasm_records** out);
ELMASM_API elmasm_status elmasm_records_write_plot(const elmasm_records* records, elmasm_figure figure,
                                                   const char* csv_path, const char* script_path);

/* ---- equivalence suite -------------------------------------------------- */

typedef struct elmasm_equivalence_options {
  const int32_t* threads; /* NULL: {1, 2, hardware concurrency} */
  size_t thread_count;
  double tolerance;       /* <= 0 selects 1e-12 */
  int32_t corrupt_variant; /* -1: none; otherwise perturb this variant's output */
} elmasm_equivalence_options;

ELMASM_API elmasm_status elmasm_run_equivalence(const elmasm_config* config,
                                                const elmasm_equivalence_options* options, elmasm_report** out);
ELMASM_API void elmasm_report_destroy(elmasm_report* report);
ELMASM_API size_t elmasm_report_size(const elmasm_report* report);
ELMASM_API int32_t elmasm_report_passed(const elmasm_report* report);
/* `combination` stays valid for the report's lifetime. */
ELMASM_API elmasm_status elmasm_report_entry(const elmasm_report* report, size_t index, const char** combination,
                                             double* max_relative, int32_t* same_indices, int32_t* passed);

#ifdef __cplusplus
}
#endif

#endif /* ELMASM_ELMASM_H */
