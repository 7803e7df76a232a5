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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmdp/bellman.hpp"
#include "rmdp/model.hpp"

namespace rmdp {

struct ExperimentConfig {
  std::vector<std::uint64_t> sample_counts;  // strictly increasing
  std::size_t num_seeds = 20;
  std::uint64_t base_seed = 1;
  double tol = 1e-6;
  /// Tolerance for the reference solve and the evaluation of each planned
  /// policy on the true model.
  double reference_tol = 1e-9;
  /// Off: wall_ms is written as 0 so that the CSV is byte-identical across
  /// runs.
  bool record_wall_time = true;
};

struct ExperimentRecord {
  std::uint64_t N = 0;
  std::uint64_t seed = 0;
  double eps_hat = 0.0;  // ||Q*_U - Q^pihat_U||_inf on the true model
  int iterations = 0;    // solver sweeps on the empirical model
  double wall_ms = 0.0;
  double eps_opt_bound = 0.0;
  /// ||Q*_U(empirical) - Q*_U(true)||_inf. Not written to the CSV.
  double q_error = 0.0;
};

struct ExperimentSummary {
  double gamma = 0.0;
  std::vector<ExperimentRecord> records;  // (N, seed) order
  std::vector<double> median_eps;         // one per N
  /// Medians at or below this are solver noise and are left out of the fits.
  double noise_floor = 0.0;
  /// Least-squares fit of log(median eps_hat) on log N over the N whose
  /// median is above noise_floor; NaN if fewer than two such points.
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t fitted_points = 0;
  double reference_eps_opt = 0.0;
  std::vector<double> median_q_error;  // one per N
  double q_error_slope = 0.0;          // same fit on median_q_error
};

/// Throws InvalidArgument for a bad config.
void check_config(const ExperimentConfig& config);

/// For every (N, seed): sample N transitions per pair from the true model,
/// plan on the empirical model, evaluate the plan on the true model and
/// compare its robust Q with the true robust optimum. Cells run in parallel;
/// records come back in (N, seed) order. If `csv` is non-null the header and
/// each finished row are written to it; on a failed cell every successful
/// row is still written before the error propagates.
ExperimentSummary run_sample_complexity(const TabularMDP& truth,
                                        const UncertaintySpec& u,
                                        const ExperimentConfig& config,
                                        std::ostream* csv = nullptr);

/// Seed used for the samples of cell (N, seed).
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t N);

std::string csv_header();
std::string csv_row(const UncertaintySpec& u, double gamma,
                    const ExperimentRecord& r);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of y on x; NaN slope for fewer than two points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> values);

}  // namespace rmdp
