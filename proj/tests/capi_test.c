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

// Exercises the shared library through its C header only.

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "rmdp/rmdp.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void test_errors(void) {
  const double kernel[] = {0.5, 0.6};
  const double reward[] = {0.0};
  rmdp_model* m = NULL;
  EXPECT(rmdp_model_create(1, 1, kernel, reward, 0.9, NULL, &m) ==
         RMDP_ERR_NON_STOCHASTIC_ROW);
  const double k2[] = {0.5, 0.6, 0.5, 0.5};
  const double r2[] = {0.0, 0.0};
  EXPECT(rmdp_model_create(2, 1, k2, r2, 0.9, NULL, &m) ==
         RMDP_ERR_NON_STOCHASTIC_ROW);
  EXPECT(m == NULL);
  EXPECT(strlen(rmdp_last_error()) > 0);
  EXPECT(rmdp_model_random(2, 2, 1.0, 1, &m) == RMDP_ERR_BAD_DISCOUNT);
  EXPECT(rmdp_model_random(2, 2, 0.9, 1, NULL) == RMDP_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(rmdp_status_name(RMDP_ERR_PARSE), "ParseError") == 0);
  EXPECT(rmdp_model_parse("{", &m, NULL) == RMDP_ERR_PARSE);
  EXPECT(rmdp_model_load("/nonexistent.json", &m, NULL) == RMDP_ERR_IO);

  const double beta = -0.1;
  rmdp_uncertainty* u = NULL;
  EXPECT(rmdp_uncertainty_create(RMDP_MODE_SA, 2.0, &beta, 1, NULL, 0, 2, 2,
                                 &u) == RMDP_ERR_NEGATIVE_BETA);
}

static void test_geometric_sum(void) {
  const double kernel[] = {1.0};
  const double reward[] = {0.5};
  rmdp_model* m = NULL;
  EXPECT(rmdp_model_create(1, 1, kernel, reward, 0.9, NULL, &m) == RMDP_OK);
  const double zero = 0.0;
  for (int mode = 0; mode < 2; ++mode) {
    rmdp_uncertainty* u = NULL;
    EXPECT(rmdp_uncertainty_create((rmdp_mode)mode, 2.0, &zero, 1, NULL, 0, 1,
                                   1, &u) == RMDP_OK);
    rmdp_solution* s = NULL;
    EXPECT(rmdp_solve(m, u, 1e-12, &s) == RMDP_OK);
    double v = 0.0;
    EXPECT(rmdp_solution_value(s, &v) == RMDP_OK);
    EXPECT(fabs(v - 5.0) < 1e-9);
    EXPECT(rmdp_solution_iterations(s) > 0);
    EXPECT(rmdp_solution_eps_opt_bound(s) <= 1e-12);
    char* json = NULL;
    EXPECT(rmdp_solution_to_json(s, &json) == RMDP_OK);
    EXPECT(json != NULL && strstr(json, "\"V\"") != NULL);
    rmdp_string_free(json);
    rmdp_solution_free(s);
    rmdp_uncertainty_free(u);
  }
  rmdp_model_free(m);
}

static void test_modes_agree_with_one_action(void) {
  rmdp_model* m = NULL;
  EXPECT(rmdp_model_random(4, 1, 0.9, 3, &m) == RMDP_OK);
  const double beta = 0.2, alpha = 0.05;
  double v[2][4];
  for (int mode = 0; mode < 2; ++mode) {
    rmdp_uncertainty* u = NULL;
    EXPECT(rmdp_uncertainty_create((rmdp_mode)mode, 1.5, &beta, 1, &alpha, 1,
                                   4, 1, &u) == RMDP_OK);
    EXPECT(rmdp_uncertainty_num_radii(u) == 4);
    rmdp_solution* s = NULL;
    EXPECT(rmdp_solve(m, u, 1e-11, &s) == RMDP_OK);
    EXPECT(rmdp_solution_value(s, v[mode]) == RMDP_OK);
    rmdp_solution_free(s);
    rmdp_uncertainty_free(u);
  }
  for (int i = 0; i < 4; ++i) EXPECT(fabs(v[0][i] - v[1][i]) < 1e-8);
  rmdp_model_free(m);
}

static void test_policy_and_kernels(void) {
  rmdp_model* m = NULL;
  EXPECT(rmdp_model_random(3, 2, 0.8, 5, &m) == RMDP_OK);
  const double beta = 0.1;
  rmdp_uncertainty* u = NULL;
  EXPECT(rmdp_uncertainty_create(RMDP_MODE_S, INFINITY, &beta, 1, NULL, 0, 3,
                                 2, &u) == RMDP_OK);
  EXPECT(isinf(rmdp_uncertainty_p(u)));
  rmdp_solution* s = NULL;
  EXPECT(rmdp_solve(m, u, 1e-10, &s) == RMDP_OK);
  double v[3], q[6], pi[6], ve[3];
  EXPECT(rmdp_solution_value(s, v) == RMDP_OK);
  EXPECT(rmdp_solution_q(s, q) == RMDP_OK);
  EXPECT(rmdp_solution_policy(s, pi) == RMDP_OK);
  EXPECT(rmdp_policy_eval(m, u, pi, 1e-10, ve, NULL) == RMDP_OK);
  for (int i = 0; i < 3; ++i) EXPECT(fabs(v[i] - ve[i]) < 1e-6);
  const double bad[6] = {0.7, 0.7, 0.5, 0.5, 0.5, 0.5};
  EXPECT(rmdp_policy_eval(m, u, bad, 1e-10, ve, NULL) ==
         RMDP_ERR_NON_SIMPLEX_POLICY_ROW);
  EXPECT(rmdp_solve_bounded(m, u, 1e-12, 2, &s) == RMDP_ERR_NON_CONVERGENCE);
  rmdp_solution_free(s);
  rmdp_uncertainty_free(u);

  rmdp_model* e = NULL;
  EXPECT(rmdp_model_empirical(m, 10, 1, &e) == RMDP_OK);
  EXPECT(rmdp_model_num_states(e) == 3);
  char* json = NULL;
  EXPECT(rmdp_model_to_json(e, NULL, &json) == RMDP_OK);
  rmdp_model* back = NULL;
  EXPECT(rmdp_model_parse(json, &back, NULL) == RMDP_OK);
  EXPECT(rmdp_model_num_actions(back) == 2);
  rmdp_string_free(json);
  rmdp_model_free(back);
  rmdp_model_free(e);
  rmdp_model_free(m);

  const double row[] = {0.5, 0.5}, vv[] = {0.0, 1.0};
  double value = -1.0, level = -1.0;
  EXPECT(rmdp_kappa_sa(row, vv, 2, 2.0, 1.0, &value, &level) == RMDP_OK);
  EXPECT(fabs(value) < 1e-12);
  EXPECT(rmdp_brute_kappa(row, vv, 2, 2.0, 1.0, 1e-3, &value) == RMDP_OK);
  EXPECT(fabs(value) < 1e-12);
  const double rows[] = {0.5, 0.5, 1.0, 0.0}, pis[] = {0.5, 0.5};
  EXPECT(rmdp_kappa_s(rows, pis, 2, vv, 2, 0.0, 2.0, &value) == RMDP_OK);
  EXPECT(fabs(value - 0.25) < 1e-12);
  double omega = 0.0;
  const double w[] = {0.0, 1.0, 5.0};
  EXPECT(rmdp_span_seminorm(w, 3, 1.0, &omega, &value) == RMDP_OK);
  EXPECT(omega == 1.0 && fabs(value - 5.0) < 1e-12);
}

static void test_experiment_and_verify(void) {
  rmdp_model* m = NULL;
  EXPECT(rmdp_model_random(3, 2, 0.9, 2, &m) == RMDP_OK);
  const double beta = 0.05;
  rmdp_uncertainty* u = NULL;
  EXPECT(rmdp_uncertainty_create(RMDP_MODE_SA, 1.0, &beta, 1, NULL, 0, 3, 2,
                                 &u) == RMDP_OK);
  const uint64_t ns[] = {10, 100};
  rmdp_experiment_config c;
  rmdp_experiment_config_init(&c);
  c.sample_counts = ns;
  c.num_sample_counts = 2;
  c.num_seeds = 2;
  c.record_wall_time = 0;
  rmdp_experiment* e = NULL;
  EXPECT(rmdp_sample_complexity(m, u, &c, NULL, &e) == RMDP_OK);
  EXPECT(rmdp_experiment_num_records(e) == 4);
  double med[2];
  EXPECT(rmdp_experiment_medians(e, med) == RMDP_OK);
  EXPECT(rmdp_experiment_q_error_medians(e, med) == RMDP_OK);
  EXPECT(med[0] > 0.0);
  EXPECT(rmdp_experiment_worst_negative(e) <= 0.0);
  rmdp_experiment_free(e);
  c.num_seeds = 0;
  EXPECT(rmdp_sample_complexity(m, u, &c, NULL, &e) ==
         RMDP_ERR_INVALID_ARGUMENT);
  rmdp_uncertainty_free(u);
  rmdp_model_free(m);

  rmdp_verify_config vc;
  rmdp_verify_config_init(&vc);
  vc.max_states = 3;
  vc.count = 10;
  vc.oracle_starts = 2;
  rmdp_verify_report* r = NULL;
  EXPECT(rmdp_verify(&vc, &r) == RMDP_OK);
  EXPECT(rmdp_verify_report_passed(r));
  EXPECT(rmdp_verify_report_num_checks(r) > 0);
  EXPECT(strlen(rmdp_verify_report_text(r)) > 0);
  EXPECT(rmdp_verify_report_check_name(r, 0) != NULL);
  rmdp_verify_report_free(r);
  vc.max_states = 9;
  EXPECT(rmdp_verify(&vc, &r) == RMDP_ERR_TOO_MANY_STATES);
}

int main(void) {
  EXPECT(strlen(rmdp_version()) > 0);
  test_errors();
  test_geometric_sum();
  test_modes_agree_with_one_action();
  test_policy_and_kernels();
  test_experiment_and_verify();
  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
