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
#include <vector>

#include "rmdp/dual_inner.hpp"
#include "rmdp/model.hpp"

namespace rmdp {

inline constexpr int kDefaultMaxIterations = 1'000'000;

struct SolveResult {
  ValueFunction V;
  QFunction Q;  // [s][a]
  Policy policy;
  int iterations = 0;
  double residual = 0.0;       // ||V_T - V_{T-1}||_inf
  double eps_opt_bound = 0.0;  // 2 gamma residual / (1 - gamma)
};

/// One state of the s-rectangular optimal backup.
struct ThresholdSolve {
  double sigma = 0.0;  // alpha_s + gamma beta_s sp_q(x*)
  double x = 0.0;      // (T* V)(s)
  std::vector<double> q_values;   // R(s,a) + gamma P0(.|s,a) . x*
  std::vector<double> advantage;  // q_values - x
  std::vector<double> policy;     // threshold policy at s
  /// Level of the truncation seed; the final dual vector x* need not be a
  /// truncation of V (see the alternating refinement in the source).
  double trunc_level = 0.0;
  int rounds = 0;
};

/// (T^pi V)(s) for every s. SA mode uses kappa_sa per action; S mode the
/// mixed-row kappa_s and the ||pi_s||_q-scaled reward penalty.
/// Throws ShapeMismatch if u or pi do not fit m.
ValueFunction robust_bellman_policy(const TabularMDP& m,
                                    const UncertaintySpec& u, const Policy& pi,
                                    const ValueFunction& V);

/// (T* V)(s) for every s.
ValueFunction robust_bellman_optimal(const TabularMDP& m,
                                     const UncertaintySpec& u,
                                     const ValueFunction& V);

struct PolicyEvaluation {
  ValueFunction V;
  QFunction Q;
  int iterations = 0;
  double residual = 0.0;
};

/// Iterates T^pi from V = 0 until a sweep changes V by at most
/// tol (1 - gamma) / (2 gamma), so ||V - V^pi|| <= tol. Q(s,a) is the robust
/// action value with sum_a pi(a|s) Q(s,a) = (T^pi V)(s).
/// Throws InvalidArgument (tol <= 0), NonConvergence.
PolicyEvaluation robust_policy_eval(const TabularMDP& m,
                                    const UncertaintySpec& u, const Policy& pi,
                                    double tol,
                                    int max_iterations = kDefaultMaxIterations);

/// Robust Q of pi at V (one backup, no iteration).
QFunction robust_q(const TabularMDP& m, const UncertaintySpec& u,
                   const Policy& pi, const ValueFunction& V);

/// Robust value iteration, sa-rectangular. Greedy policy with lowest-index
/// ties. Throws ModeMismatch, NonConvergence.
SolveResult drvi_sa(const TabularMDP& m, const UncertaintySpec& u, double tol,
                    int max_iterations = kDefaultMaxIterations);

/// Optimal backup at state s for the s-rectangular set.
/// `warm_policy`, if non-empty, is an extra starting point for the policy
/// refinement. Throws ModeMismatch, BisectionFailure, DegeneratePolicyRow.
ThresholdSolve s_rect_optimal_backup(const TabularMDP& m,
                                     const UncertaintySpec& u,
                                     const ValueFunction& V, std::size_t s,
                                     std::span<const double> warm_policy = {});

/// Robust value iteration, s-rectangular, returning the threshold policy of
/// the final sweep. Throws ModeMismatch, NonConvergence,
/// DegeneratePolicyRow.
SolveResult drvi_s(const TabularMDP& m, const UncertaintySpec& u, double tol,
                   int max_iterations = kDefaultMaxIterations);

/// drvi_sa or drvi_s according to u.mode().
SolveResult drvi(const TabularMDP& m, const UncertaintySpec& u, double tol,
                 int max_iterations = kDefaultMaxIterations);

/// Root x of sum_a max(Q_a - x, 0)^p = sigma^p on [max Q - sigma, max Q].
/// Throws BisectionFailure if the residual stays above 1e-8.
double threshold_value(std::span<const double> Q, double sigma, double p);

/// pi(a) proportional to max(A_a, 0)^(p-1); p = 1 gives the uniform
/// distribution over {a : A_a >= 0}. Rows with every weight zero put all mass
/// on the lowest-index maximizer of A if that maximum is >= 0 (sigma == 0, or
/// sigma under one ulp of max Q); with every A_a < 0 they throw
/// DegeneratePolicyRow. sigma is accepted for symmetry with threshold_value.
std::vector<double> threshold_policy(std::span<const double> advantage,
                                     double sigma, double p);

}  // namespace rmdp
