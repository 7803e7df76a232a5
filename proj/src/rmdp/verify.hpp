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
#include <string>
#include <vector>

#include "rmdp/model.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/rng.hpp"

namespace rmdp {

struct VerifyConfig {
  std::size_t max_states = 5;  // instances use 2..max_states states
  std::size_t num_actions = 3;
  std::size_t count = 200;     // instances per suite
  std::uint64_t seed = 1;
  std::vector<double> p_values{1.0, 1.5, 2.0, 3.0, kInfinity};
  std::vector<double> betas{0.0, 0.05, 0.3, 2.5};
  OracleOptions oracle;
};

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  double max_error = 0.0;  // worst observed violation measure
  double tolerance = 0.0;  // what max_error is compared against
  bool passed = true;
  std::string detail;      // first failing case, if any
};

/// Throws InvalidArgument / NegativeBeta / TooManyStates for a bad config.
void check_verify_config(const VerifyConfig& config);

/// kappa_sa and kappa_s against the oracle: |dual - oracle| within
/// 1e-4 + |S| resolution ||V||_inf, and dual <= oracle + 1e-9 (the oracle
/// only ever returns feasible points).
std::vector<CheckResult> verify_dual_oracle(const VerifyConfig& config);

/// ||T V1 - T V2|| <= gamma ||V1 - V2|| + 1e-10 for T^pi and T*, both modes.
std::vector<CheckResult> verify_contraction(const VerifyConfig& config);

/// |kappa(V1) - kappa(V2)| <= ||V1 - V2||_inf + 1e-9, both modes.
std::vector<CheckResult> verify_lipschitz(const VerifyConfig& config);

/// Solved robust values are elementwise non-increasing along
/// beta = 0, 0.05, 0.1, 0.2 (slack 1e-9), both modes.
std::vector<CheckResult> verify_monotonicity(const VerifyConfig& config,
                                             std::size_t num_models = 10);

std::vector<CheckResult> verify_all(const VerifyConfig& config);

std::string format_report(const std::vector<CheckResult>& results);

/// Random helpers shared by the suites and the tests.
std::vector<double> random_distribution(SplitMix64& rng, std::size_t n,
                                        bool allow_zeros = false);
std::vector<double> random_vector(SplitMix64& rng, std::size_t n, double lo,
                                  double hi);
Policy random_policy(SplitMix64& rng, std::size_t num_states,
                     std::size_t num_actions);

}  // namespace rmdp
