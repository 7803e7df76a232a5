// Copyright 2026 The rmdp-lp Authors.
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

// C interface to the robust MDP solver. Every object is an opaque handle
// released with its *_free function. Functions return RMDP_OK or an error
// status; rmdp_last_error() then holds a message for the calling thread.

#ifndef RMDP_RMDP_H_
#define RMDP_RMDP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(RMDP_BUILDING_LIBRARY)
#define RMDP_API __attribute__((visibility("default")))
#else
#define RMDP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmdp_status {
  RMDP_OK = 0,
  RMDP_ERR_INVALID_ARGUMENT = 1,
  RMDP_ERR_NON_STOCHASTIC_ROW = 2,
  RMDP_ERR_REWARD_OUT_OF_RANGE = 3,
  RMDP_ERR_BAD_DISCOUNT = 4,
  RMDP_ERR_EMPTY_VECTOR = 5,
  RMDP_ERR_NON_FINITE_ENTRY = 6,
  RMDP_ERR_NEGATIVE_BETA = 7,
  RMDP_ERR_DIMENSION_MISMATCH = 8,
  RMDP_ERR_NON_SIMPLEX_POLICY_ROW = 9,
  RMDP_ERR_MODE_MISMATCH = 10,
  RMDP_ERR_NON_CONVERGENCE = 11,
  RMDP_ERR_BISECTION_FAILURE = 12,
  RMDP_ERR_DEGENERATE_POLICY_ROW = 13,
  RMDP_ERR_SHAPE_MISMATCH = 14,
  RMDP_ERR_TOO_MANY_STATES = 15,
  RMDP_ERR_TOO_MANY_POLICIES = 16,
  RMDP_ERR_PARSE = 17,
  RMDP_ERR_IO = 18,
  RMDP_ERR_INTERNAL = 99
} rmdp_status;

typedef enum rmdp_mode { RMDP_MODE_SA = 0, RMDP_MODE_S = 1 } rmdp_mode;

typedef struct rmdp_model rmdp_model;
typedef struct rmdp_uncertainty rmdp_uncertainty;
typedef struct rmdp_solution rmdp_solution;
typedef struct rmdp_experiment rmdp_experiment;
typedef struct rmdp_verify_report rmdp_verify_report;

RMDP_API const char* rmdp_version(void);
RMDP_API const char* rmdp_status_name(rmdp_status status);
// Message of the last failed call on this thread; "" if none.
RMDP_API const char* rmdp_last_error(void);
RMDP_API void rmdp_string_free(char* s);

// Models. kernel is [s][a][s'], reward [s][a]; initial_dist may be NULL
// (uniform). Rows are validated to 1e-12 and renormalized.
RMDP_API rmdp_status rmdp_model_create(size_t num_states, size_t num_actions,
                                       const double* kernel,
                                       const double* reward, double discount,
                                       const double* initial_dist,
                                       rmdp_model** out);
RMDP_API rmdp_status rmdp_model_random(size_t num_states, size_t num_actions,
                                       double discount, uint64_t seed,
                                       rmdp_model** out);
// Loads a JSON model file. *out_uncertainty is set to NULL when the file has
// no uncertainty object; pass NULL to ignore it.
RMDP_API rmdp_status rmdp_model_load(const char* path, rmdp_model** out,
                                     rmdp_uncertainty** out_uncertainty);
RMDP_API rmdp_status rmdp_model_parse(const char* text, rmdp_model** out,
                                      rmdp_uncertainty** out_uncertainty);
// Same model with another discount factor.
RMDP_API rmdp_status rmdp_model_with_discount(const rmdp_model* m,
                                              double discount,
                                              rmdp_model** out);
// Model whose kernel is the empirical estimate from N generative calls per
// (s,a).
RMDP_API rmdp_status rmdp_model_empirical(const rmdp_model* m, uint64_t n,
                                          uint64_t seed, rmdp_model** out);
// JSON document; u may be NULL. Free *out with rmdp_string_free.
RMDP_API rmdp_status rmdp_model_to_json(const rmdp_model* m,
                                        const rmdp_uncertainty* u, char** out);
RMDP_API size_t rmdp_model_num_states(const rmdp_model* m);
RMDP_API size_t rmdp_model_num_actions(const rmdp_model* m);
RMDP_API double rmdp_model_discount(const rmdp_model* m);
RMDP_API void rmdp_model_free(rmdp_model* m);

// Uncertainty sets. beta and alpha hold num_states * num_actions entries in
// sa mode and num_states in s mode, or a single entry that is broadcast.
// alpha may be NULL (all zero). p may be INFINITY.
RMDP_API rmdp_status rmdp_uncertainty_create(rmdp_mode mode, double p,
                                             const double* beta,
                                             size_t beta_len,
                                             const double* alpha,
                                             size_t alpha_len,
                                             size_t num_states,
                                             size_t num_actions,
                                             rmdp_uncertainty** out);
RMDP_API rmdp_mode rmdp_uncertainty_mode(const rmdp_uncertainty* u);
RMDP_API double rmdp_uncertainty_p(const rmdp_uncertainty* u);
RMDP_API double rmdp_uncertainty_beta_sup(const rmdp_uncertainty* u);
// Number of radii: num_states * num_actions in sa mode, num_states in s mode.
RMDP_API size_t rmdp_uncertainty_num_radii(const rmdp_uncertainty* u);
RMDP_API rmdp_status rmdp_uncertainty_beta(const rmdp_uncertainty* u,
                                           double* beta);
RMDP_API rmdp_status rmdp_uncertainty_alpha(const rmdp_uncertainty* u,
                                            double* alpha);
RMDP_API void rmdp_uncertainty_free(rmdp_uncertainty* u);

// Scalar kernels.
RMDP_API rmdp_status rmdp_span_seminorm(const double* v, size_t n, double q,
                                        double* omega, double* value);
RMDP_API rmdp_status rmdp_kappa_sa(const double* nominal_row, const double* v,
                                   size_t n, double beta, double p,
                                   double* value, double* trunc_level);
// rows holds num_actions rows of length n.
RMDP_API rmdp_status rmdp_kappa_s(const double* rows, const double* pi_s,
                                  size_t num_actions, const double* v,
                                  size_t n, double beta_s, double p,
                                  double* value);
RMDP_API rmdp_status rmdp_brute_kappa(const double* nominal_row,
                                      const double* v, size_t n, double beta,
                                      double p, double resolution,
                                      double* value);

// Solvers.
RMDP_API rmdp_status rmdp_solve(const rmdp_model* m,
                                const rmdp_uncertainty* u, double tol,
                                rmdp_solution** out);
// As rmdp_solve, failing with RMDP_ERR_NON_CONVERGENCE after max_iterations
// sweeps.
RMDP_API rmdp_status rmdp_solve_bounded(const rmdp_model* m,
                                        const rmdp_uncertainty* u, double tol,
                                        int max_iterations,
                                        rmdp_solution** out);
// V has num_states entries, Q and policy num_states * num_actions.
RMDP_API rmdp_status rmdp_solution_value(const rmdp_solution* r, double* v);
RMDP_API rmdp_status rmdp_solution_q(const rmdp_solution* r, double* q);
RMDP_API rmdp_status rmdp_solution_policy(const rmdp_solution* r,
                                          double* policy);
RMDP_API int rmdp_solution_iterations(const rmdp_solution* r);
RMDP_API double rmdp_solution_residual(const rmdp_solution* r);
RMDP_API double rmdp_solution_eps_opt_bound(const rmdp_solution* r);
RMDP_API rmdp_status rmdp_solution_to_json(const rmdp_solution* r,
                                           char** out);
RMDP_API void rmdp_solution_free(rmdp_solution* r);

// Robust evaluation of a [s][a] policy; q may be NULL.
RMDP_API rmdp_status rmdp_policy_eval(const rmdp_model* m,
                                      const rmdp_uncertainty* u,
                                      const double* policy, double tol,
                                      double* v, double* q);

// Sample-complexity experiment. csv_path may be NULL. Rows of finished
// cells are written even when a later cell fails.
typedef struct rmdp_experiment_config {
  const uint64_t* sample_counts;
  size_t num_sample_counts;
  size_t num_seeds;
  uint64_t base_seed;
  double tol;
  double reference_tol;
  int record_wall_time;
} rmdp_experiment_config;

RMDP_API void rmdp_experiment_config_init(rmdp_experiment_config* config);
RMDP_API rmdp_status rmdp_sample_complexity(
    const rmdp_model* truth, const rmdp_uncertainty* u,
    const rmdp_experiment_config* config, const char* csv_path,
    rmdp_experiment** out);
RMDP_API double rmdp_experiment_slope(const rmdp_experiment* e);
RMDP_API size_t rmdp_experiment_fitted_points(const rmdp_experiment* e);
// One median per N, in grid order.
RMDP_API rmdp_status rmdp_experiment_medians(const rmdp_experiment* e,
                                             double* medians);
// Diagnostic: medians of ||Q*(empirical) - Q*(true)||_inf, one per N, and
// the slope fitted to them.
RMDP_API rmdp_status rmdp_experiment_q_error_medians(const rmdp_experiment* e,
                                                     double* medians);
RMDP_API double rmdp_experiment_q_error_slope(const rmdp_experiment* e);
// Medians at or below this value are excluded from both fits.
RMDP_API double rmdp_experiment_noise_floor(const rmdp_experiment* e);
RMDP_API size_t rmdp_experiment_num_records(const rmdp_experiment* e);
// Largest eps_hat below -2 eps_opt_bound across records, or 0.
RMDP_API double rmdp_experiment_worst_negative(const rmdp_experiment* e);
RMDP_API void rmdp_experiment_free(rmdp_experiment* e);

// Verification suites.
typedef struct rmdp_verify_config {
  size_t max_states;
  size_t num_actions;
  size_t count;
  uint64_t seed;
  double resolution;
  int oracle_starts;
  const double* p_values;  // NULL: 1, 1.5, 2, 3, inf
  size_t num_p_values;
  const double* betas;     // NULL: 0, 0.05, 0.3, 2.5
  size_t num_betas;
} rmdp_verify_config;

RMDP_API void rmdp_verify_config_init(rmdp_verify_config* config);
RMDP_API rmdp_status rmdp_verify(const rmdp_verify_config* config,
                                 rmdp_verify_report** out);
RMDP_API int rmdp_verify_report_passed(const rmdp_verify_report* r);
RMDP_API size_t rmdp_verify_report_num_checks(const rmdp_verify_report* r);
RMDP_API const char* rmdp_verify_report_check_name(
    const rmdp_verify_report* r, size_t i);
RMDP_API int rmdp_verify_report_check_passed(const rmdp_verify_report* r,
                                             size_t i);
RMDP_API double rmdp_verify_report_check_max_error(
    const rmdp_verify_report* r, size_t i);
// Formatted table, valid until the report is freed.
RMDP_API const char* rmdp_verify_report_text(const rmdp_verify_report* r);
RMDP_API void rmdp_verify_report_free(rmdp_verify_report* r);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // RMDP_RMDP_H_
