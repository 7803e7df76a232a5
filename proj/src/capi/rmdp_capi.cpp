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

#include "rmdp/rmdp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "rmdp/bellman.hpp"
#include "rmdp/dual_inner.hpp"
#include "rmdp/error.hpp"
#include "rmdp/experiment.hpp"
#include "rmdp/generative.hpp"
#include "rmdp/model.hpp"
#include "rmdp/model_io.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/spannorm.hpp"
#include "rmdp/verify.hpp"

struct rmdp_model {
  rmdp::TabularMDP mdp;
};

struct rmdp_uncertainty {
  rmdp::UncertaintySpec spec;
};

struct rmdp_solution {
  rmdp::SolveResult result;
  rmdp::UncertaintySpec spec;
};

struct rmdp_experiment {
  rmdp::ExperimentSummary summary;
};

struct rmdp_verify_report {
  std::vector<rmdp::CheckResult> checks;
  std::string text;
};

namespace {

thread_local std::string last_error;

rmdp_status to_status(rmdp::ErrorCode code) {
  using rmdp::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return RMDP_ERR_INVALID_ARGUMENT;
    case ErrorCode::NonStochasticRow: return RMDP_ERR_NON_STOCHASTIC_ROW;
    case ErrorCode::RewardOutOfRange: return RMDP_ERR_REWARD_OUT_OF_RANGE;
    case ErrorCode::BadDiscount: return RMDP_ERR_BAD_DISCOUNT;
    case ErrorCode::EmptyVector: return RMDP_ERR_EMPTY_VECTOR;
    case ErrorCode::NonFiniteEntry: return RMDP_ERR_NON_FINITE_ENTRY;
    case ErrorCode::NegativeBeta: return RMDP_ERR_NEGATIVE_BETA;
    case ErrorCode::DimensionMismatch: return RMDP_ERR_DIMENSION_MISMATCH;
    case ErrorCode::NonSimplexPolicyRow: return RMDP_ERR_NON_SIMPLEX_POLICY_ROW;
    case ErrorCode::ModeMismatch: return RMDP_ERR_MODE_MISMATCH;
    case ErrorCode::NonConvergence: return RMDP_ERR_NON_CONVERGENCE;
    case ErrorCode::BisectionFailure: return RMDP_ERR_BISECTION_FAILURE;
    case ErrorCode::DegeneratePolicyRow: return RMDP_ERR_DEGENERATE_POLICY_ROW;
    case ErrorCode::ShapeMismatch: return RMDP_ERR_SHAPE_MISMATCH;
    case ErrorCode::TooManyStates: return RMDP_ERR_TOO_MANY_STATES;
    case ErrorCode::TooManyPolicies: return RMDP_ERR_TOO_MANY_POLICIES;
    case ErrorCode::ParseError: return RMDP_ERR_PARSE;
    case ErrorCode::IoError: return RMDP_ERR_IO;
  }
  return RMDP_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and the thread's message.
template <typename Fn>
rmdp_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return RMDP_OK;
  } catch (const rmdp::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return RMDP_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) throw rmdp::Error(rmdp::ErrorCode::InvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<double> radii(const double* values, std::size_t len,
                          std::size_t expected) {
  if (values == nullptr || len == 0) return {};
  if (len == 1) return std::vector<double>(expected, values[0]);
  return {values, values + len};
}

}  // namespace

extern "C" {

const char* rmdp_version(void) { return "1.0.0"; }

const char* rmdp_status_name(rmdp_status status) {
  switch (status) {
    case RMDP_OK: return "ok";
    case RMDP_ERR_INTERNAL: return "internal error";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 18) {
    return rmdp::to_string(static_cast<rmdp::ErrorCode>(code - 1));
  }
  return "unknown status";
}

const char* rmdp_last_error(void) { return last_error.c_str(); }

void rmdp_string_free(char* s) { delete[] s; }

rmdp_status rmdp_model_create(size_t num_states, size_t num_actions,
                              const double* kernel, const double* reward,
                              double discount, const double* initial_dist,
                              rmdp_model** out) {
  return guarded([&] {
    require(kernel != nullptr && reward != nullptr && out != nullptr,
            "null argument");
    rmdp::MdpData d;
    d.num_states = num_states;
    d.num_actions = num_actions;
    d.kernel.assign(kernel, kernel + num_states * num_actions * num_states);
    d.reward.assign(reward, reward + num_states * num_actions);
    d.discount = discount;
    if (initial_dist != nullptr) {
      d.initial_dist.assign(initial_dist, initial_dist + num_states);
    } else if (num_states > 0) {
      d.initial_dist.assign(num_states, 1.0 / static_cast<double>(num_states));
    }
    *out = new rmdp_model{rmdp::TabularMDP(std::move(d))};
  });
}

rmdp_status rmdp_model_random(size_t num_states, size_t num_actions,
                              double discount, uint64_t seed,
                              rmdp_model** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new rmdp_model{
        rmdp::random_mdp(num_states, num_actions, discount, seed)};
  });
}

static void store_model_file(rmdp::ModelFile&& file, rmdp_model** out,
                             rmdp_uncertainty** out_uncertainty) {
  rmdp_uncertainty* u = nullptr;
  if (out_uncertainty != nullptr && file.uncertainty) {
    u = new rmdp_uncertainty{std::move(*file.uncertainty)};
  }
  try {
    *out = new rmdp_model{std::move(file.mdp)};
  } catch (...) {
    delete u;
    throw;
  }
  if (out_uncertainty != nullptr) *out_uncertainty = u;
}

rmdp_status rmdp_model_load(const char* path, rmdp_model** out,
                            rmdp_uncertainty** out_uncertainty) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    store_model_file(rmdp::load_model(path), out, out_uncertainty);
  });
}

rmdp_status rmdp_model_parse(const char* text, rmdp_model** out,
                             rmdp_uncertainty** out_uncertainty) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    store_model_file(rmdp::parse_model(text), out, out_uncertainty);
  });
}

rmdp_status rmdp_model_with_discount(const rmdp_model* m, double discount,
                                     rmdp_model** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "null argument");
    rmdp::MdpData d = m->mdp.data();
    d.discount = discount;
    *out = new rmdp_model{rmdp::TabularMDP(std::move(d))};
  });
}

rmdp_status rmdp_model_empirical(const rmdp_model* m, uint64_t n,
                                 uint64_t seed, rmdp_model** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "null argument");
    const rmdp::EmpiricalModel emp = rmdp::build_empirical(m->mdp, n, seed);
    *out = new rmdp_model{m->mdp.with_kernel(emp.kernel_hat())};
  });
}

rmdp_status rmdp_model_to_json(const rmdp_model* m, const rmdp_uncertainty* u,
                               char** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "null argument");
    *out = copy_string(
        rmdp::model_to_json(m->mdp, u != nullptr ? &u->spec : nullptr));
  });
}

size_t rmdp_model_num_states(const rmdp_model* m) {
  return m != nullptr ? m->mdp.num_states() : 0;
}

size_t rmdp_model_num_actions(const rmdp_model* m) {
  return m != nullptr ? m->mdp.num_actions() : 0;
}

double rmdp_model_discount(const rmdp_model* m) {
  return m != nullptr ? m->mdp.discount() : NAN;
}

void rmdp_model_free(rmdp_model* m) { delete m; }

rmdp_status rmdp_uncertainty_create(rmdp_mode mode, double p,
                                    const double* beta, size_t beta_len,
                                    const double* alpha, size_t alpha_len,
                                    size_t num_states, size_t num_actions,
                                    rmdp_uncertainty** out) {
  return guarded([&] {
    require(out != nullptr && beta != nullptr && beta_len > 0,
            "null argument");
    require(mode == RMDP_MODE_SA || mode == RMDP_MODE_S, "unknown mode");
    const std::size_t n =
        mode == RMDP_MODE_SA ? num_states * num_actions : num_states;
    auto b = radii(beta, beta_len, n);
    auto a = radii(alpha, alpha_len, n);
    *out = new rmdp_uncertainty{
        mode == RMDP_MODE_SA
            ? rmdp::UncertaintySpec::sa_rect(p, std::move(b), std::move(a),
                                             num_states, num_actions)
            : rmdp::UncertaintySpec::s_rect(p, std::move(b), std::move(a),
                                            num_states, num_actions)};
  });
}

rmdp_mode rmdp_uncertainty_mode(const rmdp_uncertainty* u) {
  return u != nullptr && u->spec.mode() == rmdp::Rectangularity::S
             ? RMDP_MODE_S
             : RMDP_MODE_SA;
}

double rmdp_uncertainty_p(const rmdp_uncertainty* u) {
  return u != nullptr ? u->spec.p() : NAN;
}

double rmdp_uncertainty_beta_sup(const rmdp_uncertainty* u) {
  return u != nullptr ? u->spec.beta_sup() : NAN;
}

size_t rmdp_uncertainty_num_radii(const rmdp_uncertainty* u) {
  return u != nullptr ? u->spec.betas().size() : 0;
}

rmdp_status rmdp_uncertainty_beta(const rmdp_uncertainty* u, double* beta) {
  return guarded([&] {
    require(u != nullptr && beta != nullptr, "null argument");
    std::copy(u->spec.betas().begin(), u->spec.betas().end(), beta);
  });
}

rmdp_status rmdp_uncertainty_alpha(const rmdp_uncertainty* u, double* alpha) {
  return guarded([&] {
    require(u != nullptr && alpha != nullptr, "null argument");
    std::copy(u->spec.alphas().begin(), u->spec.alphas().end(), alpha);
  });
}

void rmdp_uncertainty_free(rmdp_uncertainty* u) { delete u; }

rmdp_status rmdp_span_seminorm(const double* v, size_t n, double q,
                               double* omega, double* value) {
  return guarded([&] {
    require(v != nullptr || n == 0, "null argument");
    const rmdp::SpanResult r =
        rmdp::span_seminorm(std::span<const double>(v, n), q);
    if (omega != nullptr) *omega = r.omega;
    if (value != nullptr) *value = r.value;
  });
}

rmdp_status rmdp_kappa_sa(const double* nominal_row, const double* v,
                          size_t n, double beta, double p, double* value,
                          double* trunc_level) {
  return guarded([&] {
    require((nominal_row != nullptr && v != nullptr) || n == 0,
            "null argument");
    const rmdp::KappaResult r = rmdp::kappa_sa(
        std::span<const double>(nominal_row, n),
        std::span<const double>(v, n), beta, rmdp::Holder::from_p(p));
    if (value != nullptr) *value = r.value;
    if (trunc_level != nullptr) *trunc_level = r.trunc_level;
  });
}

rmdp_status rmdp_kappa_s(const double* rows, const double* pi_s,
                         size_t num_actions, const double* v, size_t n,
                         double beta_s, double p, double* value) {
  return guarded([&] {
    require(rows != nullptr && pi_s != nullptr && v != nullptr,
            "null argument");
    const rmdp::KappaResult r = rmdp::kappa_s(
        std::span<const double>(rows, num_actions * n),
        std::span<const double>(pi_s, num_actions),
        std::span<const double>(v, n), beta_s, rmdp::Holder::from_p(p));
    if (value != nullptr) *value = r.value;
  });
}

rmdp_status rmdp_brute_kappa(const double* nominal_row, const double* v,
                             size_t n, double beta, double p,
                             double resolution, double* value) {
  return guarded([&] {
    require(nominal_row != nullptr && v != nullptr && value != nullptr,
            "null argument");
    *value = rmdp::brute_kappa(std::span<const double>(nominal_row, n),
                               std::span<const double>(v, n), beta, p,
                               resolution);
  });
}

rmdp_status rmdp_solve(const rmdp_model* m, const rmdp_uncertainty* u,
                       double tol, rmdp_solution** out) {
  return guarded([&] {
    require(m != nullptr && u != nullptr && out != nullptr, "null argument");
    *out = new rmdp_solution{rmdp::drvi(m->mdp, u->spec, tol), u->spec};
  });
}

rmdp_status rmdp_solve_bounded(const rmdp_model* m, const rmdp_uncertainty* u,
                               double tol, int max_iterations,
                               rmdp_solution** out) {
  return guarded([&] {
    require(m != nullptr && u != nullptr && out != nullptr, "null argument");
    require(max_iterations > 0, "max_iterations must be > 0");
    *out = new rmdp_solution{
        rmdp::drvi(m->mdp, u->spec, tol, max_iterations), u->spec};
  });
}

rmdp_status rmdp_solution_value(const rmdp_solution* r, double* v) {
  return guarded([&] {
    require(r != nullptr && v != nullptr, "null argument");
    std::copy(r->result.V.begin(), r->result.V.end(), v);
  });
}

rmdp_status rmdp_solution_q(const rmdp_solution* r, double* q) {
  return guarded([&] {
    require(r != nullptr && q != nullptr, "null argument");
    std::copy(r->result.Q.begin(), r->result.Q.end(), q);
  });
}

rmdp_status rmdp_solution_policy(const rmdp_solution* r, double* policy) {
  return guarded([&] {
    require(r != nullptr && policy != nullptr, "null argument");
    const auto& probs = r->result.policy.probs();
    std::copy(probs.begin(), probs.end(), policy);
  });
}

int rmdp_solution_iterations(const rmdp_solution* r) {
  return r != nullptr ? r->result.iterations : -1;
}

double rmdp_solution_residual(const rmdp_solution* r) {
  return r != nullptr ? r->result.residual : NAN;
}

double rmdp_solution_eps_opt_bound(const rmdp_solution* r) {
  return r != nullptr ? r->result.eps_opt_bound : NAN;
}

rmdp_status rmdp_solution_to_json(const rmdp_solution* r, char** out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "null argument");
    *out = copy_string(rmdp::solution_to_json(r->result, r->spec));
  });
}

void rmdp_solution_free(rmdp_solution* r) { delete r; }

rmdp_status rmdp_policy_eval(const rmdp_model* m, const rmdp_uncertainty* u,
                             const double* policy, double tol, double* v,
                             double* q) {
  return guarded([&] {
    require(m != nullptr && u != nullptr && policy != nullptr && v != nullptr,
            "null argument");
    const std::size_t S = m->mdp.num_states(), A = m->mdp.num_actions();
    const rmdp::Policy pi(S, A, std::vector<double>(policy, policy + S * A));
    const rmdp::PolicyEvaluation e =
        rmdp::robust_policy_eval(m->mdp, u->spec, pi, tol);
    std::copy(e.V.begin(), e.V.end(), v);
    if (q != nullptr) std::copy(e.Q.begin(), e.Q.end(), q);
  });
}

void rmdp_experiment_config_init(rmdp_experiment_config* config) {
  if (config == nullptr) return;
  const rmdp::ExperimentConfig d;
  config->sample_counts = nullptr;
  config->num_sample_counts = 0;
  config->num_seeds = d.num_seeds;
  config->base_seed = d.base_seed;
  config->tol = d.tol;
  config->reference_tol = d.reference_tol;
  config->record_wall_time = d.record_wall_time ? 1 : 0;
}

rmdp_status rmdp_sample_complexity(const rmdp_model* truth,
                                   const rmdp_uncertainty* u,
                                   const rmdp_experiment_config* config,
                                   const char* csv_path,
                                   rmdp_experiment** out) {
  return guarded([&] {
    require(truth != nullptr && u != nullptr && config != nullptr &&
                out != nullptr,
            "null argument");
    require(config->sample_counts != nullptr || config->num_sample_counts == 0,
            "null sample_counts");
    rmdp::ExperimentConfig c;
    c.sample_counts.assign(config->sample_counts,
                           config->sample_counts + config->num_sample_counts);
    c.num_seeds = config->num_seeds;
    c.base_seed = config->base_seed;
    c.tol = config->tol;
    c.reference_tol = config->reference_tol;
    c.record_wall_time = config->record_wall_time != 0;
    rmdp::check_config(c);
    std::optional<std::ofstream> csv;
    if (csv_path != nullptr) {
      csv.emplace(csv_path);
      if (!*csv) {
        throw rmdp::Error(rmdp::ErrorCode::IoError,
                          std::string("cannot write ") + csv_path);
      }
    }
    *out = new rmdp_experiment{rmdp::run_sample_complexity(
        truth->mdp, u->spec, c, csv ? &*csv : nullptr)};
  });
}

double rmdp_experiment_slope(const rmdp_experiment* e) {
  return e != nullptr ? e->summary.slope : NAN;
}

size_t rmdp_experiment_fitted_points(const rmdp_experiment* e) {
  return e != nullptr ? e->summary.fitted_points : 0;
}

rmdp_status rmdp_experiment_medians(const rmdp_experiment* e,
                                    double* medians) {
  return guarded([&] {
    require(e != nullptr && medians != nullptr, "null argument");
    std::copy(e->summary.median_eps.begin(), e->summary.median_eps.end(),
              medians);
  });
}

rmdp_status rmdp_experiment_q_error_medians(const rmdp_experiment* e,
                                            double* medians) {
  return guarded([&] {
    require(e != nullptr && medians != nullptr, "null argument");
    std::copy(e->summary.median_q_error.begin(),
              e->summary.median_q_error.end(), medians);
  });
}

double rmdp_experiment_q_error_slope(const rmdp_experiment* e) {
  return e != nullptr ? e->summary.q_error_slope : NAN;
}

double rmdp_experiment_noise_floor(const rmdp_experiment* e) {
  return e != nullptr ? e->summary.noise_floor : NAN;
}

size_t rmdp_experiment_num_records(const rmdp_experiment* e) {
  return e != nullptr ? e->summary.records.size() : 0;
}

double rmdp_experiment_worst_negative(const rmdp_experiment* e) {
  if (e == nullptr) return NAN;
  double worst = 0.0;
  for (const auto& r : e->summary.records) {
    worst = std::max(worst, -r.eps_hat - 2.0 * r.eps_opt_bound);
  }
  return worst;
}

void rmdp_experiment_free(rmdp_experiment* e) { delete e; }

void rmdp_verify_config_init(rmdp_verify_config* config) {
  if (config == nullptr) return;
  const rmdp::VerifyConfig d;
  config->max_states = d.max_states;
  config->num_actions = d.num_actions;
  config->count = d.count;
  config->seed = d.seed;
  config->resolution = d.oracle.resolution;
  config->oracle_starts = d.oracle.starts;
  config->p_values = nullptr;
  config->num_p_values = 0;
  config->betas = nullptr;
  config->num_betas = 0;
}

rmdp_status rmdp_verify(const rmdp_verify_config* config,
                        rmdp_verify_report** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    rmdp::VerifyConfig c;
    c.max_states = config->max_states;
    c.num_actions = config->num_actions;
    c.count = config->count;
    c.seed = config->seed;
    c.oracle.resolution = config->resolution;
    require(config->oracle_starts >= 0, "oracle_starts must be >= 0");
    c.oracle.starts = config->oracle_starts;
    if (config->p_values != nullptr && config->num_p_values > 0) {
      c.p_values.assign(config->p_values,
                        config->p_values + config->num_p_values);
    }
    if (config->betas != nullptr && config->num_betas > 0) {
      c.betas.assign(config->betas, config->betas + config->num_betas);
    }
    auto* report = new rmdp_verify_report{rmdp::verify_all(c), {}};
    report->text = rmdp::format_report(report->checks);
    *out = report;
  });
}

int rmdp_verify_report_passed(const rmdp_verify_report* r) {
  if (r == nullptr) return 0;
  for (const auto& c : r->checks) {
    if (!c.passed) return 0;
  }
  return 1;
}

size_t rmdp_verify_report_num_checks(const rmdp_verify_report* r) {
  return r != nullptr ? r->checks.size() : 0;
}

const char* rmdp_verify_report_check_name(const rmdp_verify_report* r,
                                          size_t i) {
  return r != nullptr && i < r->checks.size() ? r->checks[i].name.c_str() : "";
}

int rmdp_verify_report_check_passed(const rmdp_verify_report* r, size_t i) {
  return r != nullptr && i < r->checks.size() && r->checks[i].passed ? 1 : 0;
}

double rmdp_verify_report_check_max_error(const rmdp_verify_report* r,
                                          size_t i) {
  return r != nullptr && i < r->checks.size() ? r->checks[i].max_error : NAN;
}

const char* rmdp_verify_report_text(const rmdp_verify_report* r) {
  return r != nullptr ? r->text.c_str() : "";
}

void rmdp_verify_report_free(rmdp_verify_report* r) { delete r; }

}  // extern "C"
