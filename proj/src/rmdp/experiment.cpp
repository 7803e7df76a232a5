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

#include "rmdp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "rmdp/error.hpp"
#include "rmdp/generative.hpp"
#include "rmdp/model_io.hpp"
#include "rmdp/parallel.hpp"
#include "rmdp/rng.hpp"

namespace rmdp {
namespace {

// Shortest text that reads back to the same double.
std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

LineFit fit_medians(const std::vector<std::uint64_t>& ns,
                    const std::vector<double>& medians, double floor) {
  std::vector<double> log_n, log_y;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (medians[k] > floor) {
      log_n.push_back(std::log(static_cast<double>(ns[k])));
      log_y.push_back(std::log(medians[k]));
    }
  }
  return fit_line(log_n, log_y);
}

}  // namespace

void check_config(const ExperimentConfig& c) {
  if (c.sample_counts.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty N grid");
  }
  for (std::size_t i = 0; i < c.sample_counts.size(); ++i) {
    if (c.sample_counts[i] == 0 ||
        (i > 0 && c.sample_counts[i] <= c.sample_counts[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "N grid must be positive and strictly increasing");
    }
  }
  if (c.num_seeds == 0) {
    throw Error(ErrorCode::InvalidArgument, "num_seeds must be >= 1");
  }
  if (!(c.tol > 0.0) || !(c.reference_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances must be > 0");
  }
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t N) {
  return substream_seed(seed, N);
}

std::string csv_header() {
  return "mode,p,beta,gamma,N,seed,eps_hat,iterations,wall_ms";
}

std::string csv_row(const UncertaintySpec& u, double gamma,
                    const ExperimentRecord& r) {
  std::ostringstream out;
  out << to_string(u.mode()) << ',' << format_exponent(u.p()) << ','
      << shortest(u.beta_sup()) << ',' << shortest(gamma) << ',' << r.N << ','
      << r.seed << ',' << shortest(r.eps_hat) << ',' << r.iterations << ',';
  out.precision(6);
  out << r.wall_ms;
  return out.str();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  fit.points = x.size();
  if (x.size() < 2) {
    fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

ExperimentSummary run_sample_complexity(const TabularMDP& truth,
                                        const UncertaintySpec& u,
                                        const ExperimentConfig& config,
                                        std::ostream* csv) {
  check_config(config);
  u.check_shape(truth);
  const double gamma = truth.discount();

  const SolveResult reference = drvi(truth, u, config.reference_tol);

  const std::size_t num_n = config.sample_counts.size();
  const std::size_t cells = num_n * config.num_seeds;
  std::vector<std::optional<ExperimentRecord>> results(cells);
  std::vector<std::exception_ptr> errors(cells);

  parallel_for(cells, [&](std::size_t c) {
    try {
      ExperimentRecord r;
      r.N = config.sample_counts[c / config.num_seeds];
      r.seed = config.base_seed + c % config.num_seeds;
      const auto start = std::chrono::steady_clock::now();
      const EmpiricalModel emp =
          build_empirical(truth, r.N, cell_seed(r.seed, r.N));
      const TabularMDP planned_on = empirical_rmdp(truth, emp, u);
      const SolveResult plan = drvi(planned_on, u, config.tol);
      const PolicyEvaluation eval =
          robust_policy_eval(truth, u, plan.policy, config.reference_tol);
      r.eps_hat = sup_diff(reference.Q, eval.Q);
      r.q_error = sup_diff(reference.Q, plan.Q);
      r.iterations = plan.iterations;
      r.eps_opt_bound = plan.eps_opt_bound;
      if (config.record_wall_time) {
        r.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
      }
      results[c] = r;
    } catch (...) {
      errors[c] = std::current_exception();
    }
  });

  ExperimentSummary summary;
  summary.gamma = gamma;
  summary.reference_eps_opt = reference.eps_opt_bound;
  if (csv != nullptr) *csv << csv_header() << '\n';
  std::exception_ptr first_error;
  for (std::size_t c = 0; c < cells; ++c) {
    if (results[c]) {
      if (csv != nullptr) *csv << csv_row(u, gamma, *results[c]) << '\n';
      summary.records.push_back(*results[c]);
    } else if (!first_error) {
      first_error = errors[c];
    }
  }
  if (csv != nullptr) csv->flush();
  if (first_error) std::rethrow_exception(first_error);

  // Two solves at reference_tol each leave at most this much error in a Q.
  summary.noise_floor = 2.0 * reference.eps_opt_bound +
                        4.0 * config.reference_tol / (1.0 - gamma);
  for (std::size_t k = 0; k < num_n; ++k) {
    std::vector<double> eps, qerr;
    for (std::size_t j = 0; j < config.num_seeds; ++j) {
      const ExperimentRecord& r = summary.records[k * config.num_seeds + j];
      eps.push_back(r.eps_hat);
      qerr.push_back(r.q_error);
    }
    summary.median_eps.push_back(median(std::move(eps)));
    summary.median_q_error.push_back(median(std::move(qerr)));
  }
  const LineFit fit = fit_medians(config.sample_counts, summary.median_eps,
                                  summary.noise_floor);
  summary.slope = fit.slope;
  summary.intercept = fit.intercept;
  summary.fitted_points = fit.points;
  summary.q_error_slope =
      fit_medians(config.sample_counts, summary.median_q_error,
                  summary.noise_floor)
          .slope;
  return summary;
}

}  // namespace rmdp
