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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rmdp/error.hpp"

namespace rmdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Input tolerance on kernel rows, initial distribution and policy rows.
inline constexpr double kSimplexTolerance = 1e-12;

using ValueFunction = std::vector<double>;
/// Q values stored row-major as [s][a].
using QFunction = std::vector<double>;

// ---------------------------------------------------------------------------
// Tabular model
// ---------------------------------------------------------------------------

/// Raw model fields as read from a file or assembled by hand. Nothing here is
/// checked; see validate_mdp().
struct MdpData {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> kernel;  // [s][a][s']
  std::vector<double> reward;  // [s][a]
  double discount = 0.0;
  std::vector<double> initial_dist;
};

struct ValidationIssue {
  ErrorCode code;
  std::size_t state = 0;
  std::size_t action = 0;
  double residual = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

/// Lists every violated invariant. Never throws.
ValidationReport validate_mdp(const MdpData& data);

/// Validated, immutable MDP. Kernel rows are renormalized once on
/// construction so that downstream code sees rows on the simplex.
class TabularMDP {
 public:
  /// Throws Error with the first issue of validate_mdp() if the data is bad.
  explicit TabularMDP(MdpData data);

  std::size_t num_states() const { return data_.num_states; }
  std::size_t num_actions() const { return data_.num_actions; }
  double discount() const { return data_.discount; }
  double horizon() const { return 1.0 / (1.0 - data_.discount); }

  std::span<const double> row(std::size_t s, std::size_t a) const {
    const std::size_t n = data_.num_states;
    return {data_.kernel.data() + (s * data_.num_actions + a) * n, n};
  }
  double reward(std::size_t s, std::size_t a) const {
    return data_.reward[s * data_.num_actions + a];
  }
  std::span<const double> initial_dist() const { return data_.initial_dist; }
  const MdpData& data() const { return data_; }

  /// Same model with another kernel; the new kernel is validated.
  TabularMDP with_kernel(std::vector<double> kernel) const;

 private:
  MdpData data_;
};

ValidationReport validate_mdp(const TabularMDP& m);

/// Garnet-style generator: rows are normalized Exp(1) draws (a flat
/// Dirichlet), rewards uniform on [0,1], initial distribution uniform.
/// Bit-identical output for a given seed.
TabularMDP random_mdp(std::size_t num_states, std::size_t num_actions,
                      double discount, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Uncertainty sets
// ---------------------------------------------------------------------------

enum class Rectangularity { SA, S };

const char* to_string(Rectangularity mode) noexcept;

/// Hölder conjugate: 1 ↔ +inf, 2 ↔ 2.
double conjugate_exponent(double p);

/// L_p ball around the nominal kernel and reward. Radii are indexed [s][a]
/// in SA mode and [s] in S mode. q is derived from p on every call.
class UncertaintySpec {
 public:
  static UncertaintySpec sa_rect(double p, std::vector<double> beta,
                                 std::vector<double> alpha,
                                 std::size_t num_states,
                                 std::size_t num_actions);
  static UncertaintySpec s_rect(double p, std::vector<double> beta,
                                std::vector<double> alpha,
                                std::size_t num_states,
                                std::size_t num_actions);
  /// Scalar radii broadcast to every (s,a) or s.
  static UncertaintySpec uniform(Rectangularity mode, double p, double beta,
                                 double alpha, std::size_t num_states,
                                 std::size_t num_actions);

  Rectangularity mode() const { return mode_; }
  double p() const { return p_; }
  double q() const { return conjugate_exponent(p_); }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  /// Kernel radius for (s,a); in S mode the action is ignored.
  double beta(std::size_t s, std::size_t a = 0) const {
    return beta_[index(s, a)];
  }
  double alpha(std::size_t s, std::size_t a = 0) const {
    return alpha_[index(s, a)];
  }
  const std::vector<double>& betas() const { return beta_; }
  const std::vector<double>& alphas() const { return alpha_; }
  double beta_sup() const;
  double alpha_sup() const;

  /// Throws ShapeMismatch unless the radii fit the model's dimensions.
  void check_shape(const TabularMDP& m) const;

  /// Copy with every kernel radius replaced by `beta`.
  UncertaintySpec with_beta(double beta) const;

 private:
  UncertaintySpec(Rectangularity mode, double p, std::vector<double> beta,
                  std::vector<double> alpha, std::size_t num_states,
                  std::size_t num_actions);

  std::size_t index(std::size_t s, std::size_t a) const {
    return mode_ == Rectangularity::SA ? s * num_actions_ + a : s;
  }

  Rectangularity mode_;
  double p_;
  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::size_t num_states_;
  std::size_t num_actions_;
};

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

/// Row-stochastic state-to-action distribution.
class Policy {
 public:
  /// Throws NonSimplexPolicyRow on a negative entry or a row sum off by more
  /// than kSimplexTolerance.
  Policy(std::size_t num_states, std::size_t num_actions,
         std::vector<double> probs);

  static Policy deterministic(std::size_t num_actions,
                              std::span<const std::size_t> actions);
  static Policy uniform(std::size_t num_states, std::size_t num_actions);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::span<const double> row(std::size_t s) const {
    return {probs_.data() + s * num_actions_, num_actions_};
  }
  double operator()(std::size_t s, std::size_t a) const {
    return probs_[s * num_actions_ + a];
  }
  const std::vector<double>& probs() const { return probs_; }
  bool is_deterministic() const;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<double> probs_;
};

/// Checks one action distribution; throws NonSimplexPolicyRow.
void check_simplex_row(std::span<const double> row, const char* what);

// ---------------------------------------------------------------------------
// Generative-model data
// ---------------------------------------------------------------------------

/// Transition counts from N generative calls per (s,a).
struct EmpiricalModel {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::uint64_t samples_per_pair = 0;
  std::vector<std::uint64_t> counts;  // [s][a][s']

  /// counts / N, row by row. An all-zero row stays zero (and fails
  /// validation downstream).
  std::vector<double> kernel_hat() const;
};

}  // namespace rmdp
