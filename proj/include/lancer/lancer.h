// Copyright 2026 The lancer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LANCER_LANCER_H_
#define LANCER_LANCER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(LANCER_BUILDING_LIBRARY)
#define LANCER_API __attribute__((visibility("default")))
#else
#define LANCER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure a message describing the
 * most recent error of the calling thread is available from
 * lancer_last_error() until the next failing call on that thread. */
typedef enum lancer_status {
  LANCER_OK = 0,
  LANCER_ERR_INTERNAL = 1,
  LANCER_ERR_CONFIG = 2,
  LANCER_ERR_DATA = 3,
  LANCER_ERR_NUMERICAL = 4,
  LANCER_ERR_IO = 5,
  LANCER_ERR_INVALID_ARGUMENT = 6,
} lancer_status;

typedef struct lancer_dataset lancer_dataset;
typedef struct lancer_model lancer_model;

LANCER_API const char* lancer_version(void);
LANCER_API const char* lancer_last_error(void);
LANCER_API const char* lancer_status_name(lancer_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
LANCER_API void lancer_string_free(char* s);

/* ---- run configs (JSON documents) ---- */

/* Validates a config and returns its canonical form with defaults filled. */
LANCER_API lancer_status lancer_config_normalize(const char* config_json,
                                                 char** out_json);
LANCER_API lancer_status lancer_config_hash(const char* config_json,
                                            char** out_hash);

/* ---- experiment commands; `workers` >= 1 ---- */

LANCER_API lancer_status lancer_cmd_generate(const char* config_json,
                                             int workers);
LANCER_API lancer_status lancer_cmd_train(const char* config_json, int workers);
/* `checkpoint_path` may be NULL for <run_dir>/checkpoint.json. */
LANCER_API lancer_status lancer_cmd_evaluate(const char* config_json,
                                             const char* checkpoint_path,
                                             int workers);
/* `grid_json` maps dotted config paths to arrays of values. Failed cells are
 * reported in sweep.csv; the number of failed cells is stored in
 * `failed_cells` when it is non-NULL. */
LANCER_API lancer_status lancer_cmd_sweep(const char* config_json,
                                          const char* grid_json, int workers,
                                          size_t* failed_cells);
LANCER_API lancer_status lancer_cmd_report(const char* const* run_dirs,
                                           size_t n_run_dirs,
                                           const char* out_prefix);

/* ---- datasets ---- */

/* All n_train + n_test instances of the config, train first. */
LANCER_API lancer_status lancer_dataset_generate(const char* config_json,
                                                 lancer_dataset** out);
LANCER_API lancer_status lancer_dataset_load(const char* path,
                                             lancer_dataset** out);
LANCER_API lancer_status lancer_dataset_save(const lancer_dataset* ds,
                                             const char* path);
LANCER_API lancer_status lancer_dataset_export_csv(const lancer_dataset* ds,
                                                   const char* path);
LANCER_API lancer_status lancer_dataset_size(const lancer_dataset* ds,
                                             size_t* out);
/* Width of the cost vector handed to the solver. */
LANCER_API lancer_status lancer_dataset_cost_dim(const lancer_dataset* ds,
                                                 size_t* out);
LANCER_API lancer_status lancer_dataset_feature_dim(const lancer_dataset* ds,
                                                    size_t* out);
LANCER_API lancer_status lancer_dataset_features(const lancer_dataset* ds,
                                                 size_t index, double* out,
                                                 size_t capacity);
/* Solves instance `index` under surrogate costs `c` (cost_dim entries),
 * writes the decision into `x_out` (decision_dim entries; may be NULL when
 * x_capacity is 0) and its true objective into `objective`. */
LANCER_API lancer_status lancer_dataset_solve(const lancer_dataset* ds,
                                              size_t index, const double* c,
                                              size_t c_len, double* x_out,
                                              size_t x_capacity,
                                              double* objective);
LANCER_API void lancer_dataset_free(lancer_dataset* ds);

/* ---- target models ---- */

/* Loads a binary model file (target.lmlp) or the target of a checkpoint. */
LANCER_API lancer_status lancer_model_load(const char* path,
                                           lancer_model** out);
LANCER_API lancer_status lancer_model_dims(const lancer_model* m,
                                           size_t* input_dim,
                                           size_t* output_dim);
LANCER_API lancer_status lancer_model_forward(const lancer_model* m,
                                              const double* input,
                                              size_t input_len, double* out,
                                              size_t out_capacity);
LANCER_API void lancer_model_free(lancer_model* m);

#ifdef __cplusplus
}
#endif

#endif /* LANCER_LANCER_H_ */
