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
#include <functional>
#include <span>
#include <vector>

namespace rmdp {

/// Exponent pair of an L_p ball and its dual norm, 1/p + 1/q = 1.
struct Holder {
  double p = 1.0;
  double q = 0.0;

  static Holder from_p(double p);
  bool p_is_one() const;
  bool p_is_infinite() const;
};

/// Value of the inner problem inf { P' . V : P' in simplex, ||P' - P0||_p <= beta }.
struct KappaResult {
  double value = 0.0;
  /// Dual level in [min V, max V]: states valued above it lose probability
  /// mass to the adversary. For p = 1 it is the optimal truncation level.
  double trunc_level = 0.0;
  int iterations = 0;
};

/// KappaResult plus the optimal primal row and a dual certificate
/// x* = V - mu* (x* <= V) with value = P0 . x* - beta * sp_q(x*).
struct InnerSolution {
  KappaResult kappa;
  std::vector<double> worst_row;
  /// Empty for p = +inf, where no caller needs it.
  std::vector<double> dual_vector;
};

/// [V]_level: elementwise min(V, level).
std::vector<double> truncate(std::span<const double> V, double level);

/// Exact inner minimization for the sa-rectangular ball.
/// Throws NegativeBeta, DimensionMismatch, NonFiniteEntry.
KappaResult kappa_sa(std::span<const double> nominal_row,
                     std::span<const double> V, double beta, Holder h);

InnerSolution solve_inner(std::span<const double> nominal_row,
                          std::span<const double> V, double beta, Holder h);

/// s-rectangular inner problem for a fixed action distribution pi_s:
/// the sa problem on the mixed row sum_a pi(a) P0(.|s,a) with radius
/// beta_s * ||pi_s||_q. `rows` holds one nominal row per action, contiguous.
/// Throws as kappa_sa plus NonSimplexPolicyRow.
KappaResult kappa_s(std::span<const double> rows,
                    std::span<const double> pi_s, std::span<const double> V,
                    double beta_s, Holder h);

InnerSolution solve_inner_s(std::span<const double> rows,
                            std::span<const double> pi_s,
                            std::span<const double> V, double beta_s,
                            Holder h);

/// sum_a pi(a) rows[a].
std::vector<double> mixed_row(std::span<const double> rows,
                              std::span<const double> pi_s);

/// max over alpha in [min V, max V] of
///   nominal_row . [V]_alpha - beta * sp_q([V]_alpha).
/// Equals kappa_sa for p = 1 and never exceeds it otherwise. The objective
/// is concave between consecutive sorted entries of V, not globally, so each
/// such interval gets its own golden-section search.
KappaResult truncated_dual_sa(std::span<const double> nominal_row,
                              std::span<const double> V, double beta,
                              Holder h);

enum class TruncationSearch {
  Exhaustive,  // golden-section on every interval
  Local,       // breakpoint scan, then golden-section next to the best one
};

struct TruncationOptimum {
  double level = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Maximizes objective(level) over level in [min V, max V], assuming it is
/// concave between consecutive distinct entries of V.
TruncationOptimum maximize_over_truncation(
    std::span<const double> V, const std::function<double(double)>& objective,
    TruncationSearch search);

}  // namespace rmdp
