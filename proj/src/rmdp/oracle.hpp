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
#include <optional>
#include <span>
#include <vector>

#include "rmdp/model.hpp"

namespace rmdp {

/// Brute-force ground truth. Nothing here shares code with the dual solvers.
struct OracleOptions {
  double resolution = 1e-3;
  /// Random feasible starts for projected gradient (general p only).
  int starts = 50;
  int pgd_iterations = 500;
  int projection_rounds = 50;
  /// The simplex grid of step `resolution` is scanned only if it has at most
  /// this many points.
  std::size_t grid_cap = 1'000'000;
  std::uint64_t seed = 0x0A11CE5EEDULL;
};

inline constexpr std::size_t kOracleMaxStates = 6;

/// min { P . V : P in simplex, ||P - nominal_row||_p <= beta }.
/// p = 1: greedy mass transport. p = +inf: per-state saturation with a
/// balancing pass. Otherwise projected gradient from random feasible starts
/// plus the simplex grid when it is small enough; every candidate is made
/// exactly feasible before it is scored, so the result is an upper bound.
/// Throws TooManyStates for more than kOracleMaxStates states.
double brute_kappa(std::span<const double> nominal_row,
                   std::span<const double> V, double beta, double p,
                   const OracleOptions& options = {});

double brute_kappa(std::span<const double> nominal_row,
                   std::span<const double> V, double beta, double p,
                   double resolution);

/// The s-rectangular inner problem for fixed pi_s in the mixed-row form: the
/// single-row oracle on sum_a pi(a) P0_a with radius beta_s ||pi_s||_q.
double brute_kappa_s(std::span<const double> rows,
                     std::span<const double> pi_s, std::span<const double> V,
                     double beta_s, double p,
                     const OracleOptions& options = {});

/// The same problem over the joint set itself: every action row stays in the
/// simplex and sum_a ||P_a - P0_a||_p^p <= beta_s^p. Its value is never
/// below the mixed-row form and equals it while no row hits zero.
double brute_kappa_s_joint(std::span<const double> rows,
                           std::span<const double> pi_s,
                           std::span<const double> V, double beta_s, double p,
                           const OracleOptions& options = {});

/// Euclidean projection onto { x : ||x - center||_p <= radius }.
std::vector<double> project_lp_ball(std::span<const double> y,
                                    std::span<const double> center,
                                    double radius, double p);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::span<const double> y);

inline constexpr std::size_t kRobustOracleMaxStates = 4;
inline constexpr std::size_t kRobustOracleMaxActions = 3;

/// Fixed point of the robust policy operator with every inner minimum taken
/// by the oracle. Starts from `warm_start` if given, else from 0, and stops
/// when a sweep changes V by at most tol * (1 - gamma) / (2 gamma).
/// Throws TooManyStates (more than 4 states or 3 actions), NonConvergence.
ValueFunction brute_robust_value(const TabularMDP& m, const UncertaintySpec& u,
                                 const Policy& pi, double tol,
                                 const OracleOptions& options = {},
                                 const ValueFunction* warm_start = nullptr);

struct ExhaustiveResult {
  Policy policy;
  ValueFunction value;
};

inline constexpr std::size_t kMaxEnumeratedPolicies = 64;

/// Enumerates every deterministic policy, evaluates each with
/// brute_robust_value and keeps the one with the largest total value
/// (first in enumeration order on ties). SA mode only.
/// Throws TooManyPolicies if |A|^|S| > 64, ModeMismatch.
ExhaustiveResult exhaustive_sa_optimum(const TabularMDP& m,
                                       const UncertaintySpec& u, double tol,
                                       const OracleOptions& options = {});

/// Non-robust references.
ValueFunction classical_policy_eval(const TabularMDP& m, const Policy& pi);

struct ClassicalSolution {
  ValueFunction V;
  QFunction Q;
  int iterations = 0;
};

/// Value iteration from 0 until the sup-norm change is at most
/// tol * (1 - gamma) / (2 gamma).
ClassicalSolution classical_value_iteration(const TabularMDP& m, double tol);

}  // namespace rmdp
