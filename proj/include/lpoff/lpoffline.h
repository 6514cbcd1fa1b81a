/* Copyright 2026 The lpoffline Authors
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

/* C interface to lpoffline.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns an lpo_status; on failure lpo_last_error() describes
 * the problem (the message is per thread and valid until the next call on
 * that thread). Strings returned through char** out-parameters are owned by
 * the caller and released with lpo_string_free.
 *
 * A NULL dataset argument selects the exact population model.
 */

#ifndef LPOFF_LPOFFLINE_H_
#define LPOFF_LPOFFLINE_H_

#include <stdint.h>

#if defined(_WIN32)
#if defined(LPOFF_BUILDING_LIBRARY)
#define LPO_API __declspec(dllexport)
#else
#define LPO_API __declspec(dllimport)
#endif
#else
#define LPO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lpo_status {
  LPO_OK = 0,
  LPO_ERR_INVALID_ARGUMENT = 1,
  LPO_ERR_PARSE = 2,
  LPO_ERR_NUMERIC = 3,
  LPO_ERR_INFEASIBLE = 4,
  /* The call completed but at least one audited inequality failed. */
  LPO_ERR_AUDIT_FAILED = 5,
  LPO_ERR_IO = 6,
  LPO_ERR_INTERNAL = 7
} lpo_status;

typedef struct lpo_mdp lpo_mdp;
typedef struct lpo_dist lpo_dist;
typedef struct lpo_dataset lpo_dataset;

LPO_API const char* lpo_version(void);
LPO_API const char* lpo_last_error(void);
LPO_API const char* lpo_status_name(lpo_status status);
LPO_API void lpo_string_free(char* str);

/* MDPs. */
LPO_API lpo_status lpo_mdp_from_json(const char* json, lpo_mdp** out);
LPO_API lpo_status lpo_mdp_garnet(int num_states, int num_actions, double gamma,
                                  int branching_factor, uint64_t seed, lpo_mdp** out);
LPO_API lpo_status lpo_mdp_to_json(const lpo_mdp* mdp, char** out);
LPO_API int lpo_mdp_num_states(const lpo_mdp* mdp);
LPO_API int lpo_mdp_num_actions(const lpo_mdp* mdp);
/* Optimal return from the MDP's initial distribution. */
LPO_API lpo_status lpo_mdp_optimal_return(const lpo_mdp* mdp, double* out);
LPO_API void lpo_mdp_free(lpo_mdp* mdp);

/* Data distributions over state-action pairs. */
LPO_API lpo_status lpo_dist_from_json(const char* json, lpo_dist** out);
/* Occupancy mixture alpha * theta_{pi*} + (1 - alpha) * theta_{uniform}. */
LPO_API lpo_status lpo_dist_generate(const lpo_mdp* mdp, double alpha, uint64_t seed,
                                     lpo_dist** out);
LPO_API lpo_status lpo_dist_to_json(const lpo_dist* dist, char** out);
LPO_API void lpo_dist_free(lpo_dist* dist);

/* Datasets of (s, a, s', r) tuples, CSV header `s,a,s_next,r`. */
LPO_API lpo_status lpo_dataset_sample(const lpo_mdp* mdp, const lpo_dist* dist, int64_t n,
                                      uint64_t seed, lpo_dataset** out);
LPO_API lpo_status lpo_dataset_from_csv(const char* csv, lpo_dataset** out);
LPO_API lpo_status lpo_dataset_to_csv(const lpo_dataset* dataset, char** out);
LPO_API int64_t lpo_dataset_size(const lpo_dataset* dataset);
LPO_API void lpo_dataset_free(lpo_dataset* dataset);

typedef enum lpo_threshold_mode {
  LPO_THRESHOLD_GENERAL = 0,
  LPO_THRESHOLD_TABULAR = 1,
  LPO_THRESHOLD_EXPLICIT = 2
} lpo_threshold_mode;

typedef struct lpo_case1_params {
  double b_w;
  double delta;
  lpo_threshold_mode mode;
  /* Budget for LPO_THRESHOLD_EXPLICIT; may be +inf. */
  double epsilon;
  /* Log class cardinalities for LPO_THRESHOLD_GENERAL; NaN for defaults. */
  double log_card_b;
  double log_card_w;
  /* Sample size used by the formulas when the dataset is NULL. */
  int64_t n;
  /* If non-NULL, the compiled LP is written here in plain text. */
  const char* lp_dump_path;
} lpo_case1_params;

typedef struct lpo_case2_params {
  double b_w;
  double delta;
  double log_card_w;
  double log_card_v;
  int64_t n;
  const char* lp_dump_path;
} lpo_case2_params;

LPO_API void lpo_case1_params_default(lpo_case1_params* params);
LPO_API void lpo_case2_params_default(lpo_case2_params* params);

/* Solve reports are JSON documents. An infeasible program is returned as
 * LPO_ERR_INFEASIBLE with the report still filled in. */
LPO_API lpo_status lpo_solve_case1(const lpo_mdp* mdp, const lpo_dist* dist,
                                   const lpo_dataset* dataset, const lpo_case1_params* params,
                                   char** report_json);
LPO_API lpo_status lpo_solve_case2(const lpo_mdp* mdp, const lpo_dist* dist,
                                   const lpo_dataset* dataset, const lpo_case2_params* params,
                                   char** report_json);

/* Solves both programs and audits every inequality on the result. Returns
 * LPO_ERR_AUDIT_FAILED (report filled in) when a check fails. */
LPO_API lpo_status lpo_check(const lpo_mdp* mdp, const lpo_dist* dist, const lpo_dataset* dataset,
                             const lpo_case1_params* case1, const lpo_case2_params* case2,
                             char** report_json);

/* Runs a sweep described by a JSON experiment config; returns CSV rows. */
LPO_API lpo_status lpo_sweep(const char* config_json, char** csv);
/* Fits log median suboptimality against log n for case 1 or 2. */
LPO_API lpo_status lpo_fit_rate(const char* csv, int case_id, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* LPOFF_LPOFFLINE_H_ */
