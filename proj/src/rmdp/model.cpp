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

#include "rmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rmdp/rng.hpp"

namespace rmdp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::RewardOutOfRange: return "RewardOutOfRange";
    case ErrorCode::BadDiscount: return "BadDiscount";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NegativeBeta: return "NegativeBeta";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSimplexPolicyRow: return "NonSimplexPolicyRow";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BisectionFailure: return "BisectionFailure";
    case ErrorCode::DegeneratePolicyRow: return "DegeneratePolicyRow";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooManyStates: return "TooManyStates";
    case ErrorCode::TooManyPolicies: return "TooManyPolicies";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(Rectangularity mode) noexcept {
  return mode == Rectangularity::SA ? "sa" : "s";
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << '\n';
    out << to_string(issues[i].code) << ": " << issues[i].message;
  }
  return out.str();
}

ValidationReport validate_mdp(const MdpData& d) {
  ValidationReport report;
  auto add = [&](ErrorCode code, std::size_t s, std::size_t a, double r,
                 std::string msg) {
    report.issues.push_back({code, s, a, r, std::move(msg)});
  };

  const std::size_t S = d.num_states, A = d.num_actions;
  if (S == 0 || A == 0) {
    add(ErrorCode::DimensionMismatch, 0, 0, 0.0,
        "num_states and num_actions must be positive");
    return report;
  }
  if (d.kernel.size() != S * A * S) {
    add(ErrorCode::DimensionMismatch, 0, 0, 0.0,
        "kernel has " + std::to_string(d.kernel.size()) + " entries, expected " +
            std::to_string(S * A * S));
  }
  if (d.reward.size() != S * A) {
    add(ErrorCode::DimensionMismatch, 0, 0, 0.0,
        "reward has " + std::to_string(d.reward.size()) + " entries, expected " +
            std::to_string(S * A));
  }
  if (d.initial_dist.size() != S) {
    add(ErrorCode::DimensionMismatch, 0, 0, 0.0,
        "initial_dist has " + std::to_string(d.initial_dist.size()) +
            " entries, expected " + std::to_string(S));
  }
  if (!report.ok()) return report;

  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double* row = d.kernel.data() + (s * A + a) * S;
      double sum = 0.0;
      bool negative = false, finite = true;
      for (std::size_t t = 0; t < S; ++t) {
        if (!std::isfinite(row[t])) finite = false;
        if (row[t] < 0.0) negative = true;
        sum += row[t];
      }
      const double residual = std::abs(sum - 1.0);
      if (!finite || negative || residual > kSimplexTolerance) {
        std::ostringstream msg;
        msg << "kernel[" << s << "][" << a << "]";
        if (!finite) msg << " has a non-finite entry";
        else if (negative) msg << " has a negative entry";
        else msg << " sums to " << sum << " (residual " << residual << ")";
        add(ErrorCode::NonStochasticRow, s, a, residual, msg.str());
      }
      const double r = d.reward[s * A + a];
      if (!(r >= 0.0 && r <= 1.0)) {
        std::ostringstream msg;
        msg << "reward[" << s << "][" << a << "] = " << r
            << " lies outside [0,1]";
        add(ErrorCode::RewardOutOfRange, s, a, 0.0, msg.str());
      }
    }
  }
  if (!(d.discount >= 0.0 && d.discount < 1.0)) {
    std::ostringstream msg;
    msg << "discount " << d.discount << " lies outside [0,1)";
    add(ErrorCode::BadDiscount, 0, 0, 0.0, msg.str());
  }
  double init_sum = 0.0;
  bool init_bad = false;
  for (double x : d.initial_dist) {
    if (!std::isfinite(x) || x < 0.0) init_bad = true;
    init_sum += x;
  }
  if (init_bad || std::abs(init_sum - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg << "initial_dist is not a probability vector (sum " << init_sum << ")";
    add(ErrorCode::NonStochasticRow, 0, 0, std::abs(init_sum - 1.0),
        msg.str());
  }
  return report;
}

namespace {

void renormalize(std::span<double> row) {
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  for (double& x : row) x /= sum;
}

}  // namespace

TabularMDP::TabularMDP(MdpData data) : data_(std::move(data)) {
  const ValidationReport report = validate_mdp(data_);
  if (!report.ok()) {
    throw Error(report.issues.front().code, report.summary());
  }
  const std::size_t S = data_.num_states;
  for (std::size_t i = 0; i < data_.num_states * data_.num_actions; ++i) {
    renormalize(std::span<double>(data_.kernel.data() + i * S, S));
  }
  renormalize(data_.initial_dist);
}

TabularMDP TabularMDP::with_kernel(std::vector<double> kernel) const {
  MdpData d = data_;
  d.kernel = std::move(kernel);
  return TabularMDP(std::move(d));
}

ValidationReport validate_mdp(const TabularMDP& m) {
  return validate_mdp(m.data());
}

TabularMDP random_mdp(std::size_t num_states, std::size_t num_actions,
                      double discount, std::uint64_t seed) {
  if (num_states == 0 || num_actions == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "random_mdp: sizes must be at least 1");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw Error(ErrorCode::BadDiscount, "random_mdp: discount outside [0,1)");
  }
  SplitMix64 rng(substream_seed(seed, 0x4741524E4554ULL));
  MdpData d;
  d.num_states = num_states;
  d.num_actions = num_actions;
  d.discount = discount;
  d.kernel.resize(num_states * num_actions * num_states);
  for (std::size_t i = 0; i < num_states * num_actions; ++i) {
    double* row = d.kernel.data() + i * num_states;
    double sum = 0.0;
    for (std::size_t t = 0; t < num_states; ++t) {
      row[t] = -std::log(rng.uniform_open_low());
      sum += row[t];
    }
    // Exp(1) draws can be exactly 0 only when u == 1; keep rows positive.
    if (sum <= 0.0) {
      std::fill(row, row + num_states, 1.0);
      sum = static_cast<double>(num_states);
    }
    for (std::size_t t = 0; t < num_states; ++t) row[t] /= sum;
  }
  d.reward.resize(num_states * num_actions);
  for (double& r : d.reward) r = rng.uniform();
  d.initial_dist.assign(num_states, 1.0 / static_cast<double>(num_states));
  return TabularMDP(std::move(d));
}

// ---------------------------------------------------------------------------

double conjugate_exponent(double p) {
  if (!(p >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "exponent p must be >= 1");
  }
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

UncertaintySpec::UncertaintySpec(Rectangularity mode, double p,
                                 std::vector<double> beta,
                                 std::vector<double> alpha,
                                 std::size_t num_states,
                                 std::size_t num_actions)
    : mode_(mode),
      p_(p),
      beta_(std::move(beta)),
      alpha_(std::move(alpha)),
      num_states_(num_states),
      num_actions_(num_actions) {
  if (!(p_ >= 1.0) || std::isnan(p_)) {
    throw Error(ErrorCode::InvalidArgument, "uncertainty: p must be >= 1");
  }
  const std::size_t n =
      mode_ == Rectangularity::SA ? num_states_ * num_actions_ : num_states_;
  if (alpha_.empty()) alpha_.assign(n, 0.0);
  if (beta_.size() != n || alpha_.size() != n) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string("uncertainty: radius arrays must have ") +
                    std::to_string(n) + " entries in " + to_string(mode_) +
                    " mode");
  }
  for (double b : beta_) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::NegativeBeta,
                  "uncertainty: kernel radius beta must be finite and >= 0");
    }
  }
  for (double a : alpha_) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::InvalidArgument,
                  "uncertainty: reward radius alpha must be finite and >= 0");
    }
  }
}

UncertaintySpec UncertaintySpec::sa_rect(double p, std::vector<double> beta,
                                         std::vector<double> alpha,
                                         std::size_t num_states,
                                         std::size_t num_actions) {
  return UncertaintySpec(Rectangularity::SA, p, std::move(beta),
                         std::move(alpha), num_states, num_actions);
}

UncertaintySpec UncertaintySpec::s_rect(double p, std::vector<double> beta,
                                        std::vector<double> alpha,
                                        std::size_t num_states,
                                        std::size_t num_actions) {
  return UncertaintySpec(Rectangularity::S, p, std::move(beta),
                         std::move(alpha), num_states, num_actions);
}

UncertaintySpec UncertaintySpec::uniform(Rectangularity mode, double p,
                                         double beta, double alpha,
                                         std::size_t num_states,
                                         std::size_t num_actions) {
  const std::size_t n =
      mode == Rectangularity::SA ? num_states * num_actions : num_states;
  return UncertaintySpec(mode, p, std::vector<double>(n, beta),
                         std::vector<double>(n, alpha), num_states,
                         num_actions);
}

double UncertaintySpec::beta_sup() const {
  return *std::max_element(beta_.begin(), beta_.end());
}

double UncertaintySpec::alpha_sup() const {
  return *std::max_element(alpha_.begin(), alpha_.end());
}

void UncertaintySpec::check_shape(const TabularMDP& m) const {
  if (m.num_states() != num_states_ || m.num_actions() != num_actions_) {
    std::ostringstream msg;
    msg << "uncertainty set built for " << num_states_ << "x" << num_actions_
        << " but model is " << m.num_states() << "x" << m.num_actions();
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
}

UncertaintySpec UncertaintySpec::with_beta(double beta) const {
  UncertaintySpec copy = *this;
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::NegativeBeta, "uncertainty: beta must be >= 0");
  }
  std::fill(copy.beta_.begin(), copy.beta_.end(), beta);
  return copy;
}

// ---------------------------------------------------------------------------

void check_simplex_row(std::span<const double> row, const char* what) {
  double sum = 0.0;
  for (double x : row) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::NonSimplexPolicyRow,
                  std::string(what) + ": negative or non-finite probability");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg << what << ": probabilities sum to " << sum;
    throw Error(ErrorCode::NonSimplexPolicyRow, msg.str());
  }
}

Policy::Policy(std::size_t num_states, std::size_t num_actions,
               std::vector<double> probs)
    : num_states_(num_states),
      num_actions_(num_actions),
      probs_(std::move(probs)) {
  if (probs_.size() != num_states_ * num_actions_ || num_actions_ == 0) {
    throw Error(ErrorCode::DimensionMismatch, "policy: wrong number of entries");
  }
  for (std::size_t s = 0; s < num_states_; ++s) {
    check_simplex_row(row(s), "policy row");
  }
}

Policy Policy::deterministic(std::size_t num_actions,
                             std::span<const std::size_t> actions) {
  std::vector<double> probs(actions.size() * num_actions, 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= num_actions) {
      throw Error(ErrorCode::DimensionMismatch, "policy: action out of range");
    }
    probs[s * num_actions + actions[s]] = 1.0;
  }
  return Policy(actions.size(), num_actions, std::move(probs));
}

Policy Policy::uniform(std::size_t num_states, std::size_t num_actions) {
  return Policy(num_states, num_actions,
                std::vector<double>(num_states * num_actions,
                                    1.0 / static_cast<double>(num_actions)));
}

bool Policy::is_deterministic() const {
  for (std::size_t s = 0; s < num_states_; ++s) {
    const auto r = row(s);
    if (std::count(r.begin(), r.end(), 1.0) != 1) return false;
  }
  return true;
}

std::vector<double> EmpiricalModel::kernel_hat() const {
  // Rows are divided by their own total, which is samples_per_pair for
  // anything built by build_empirical().
  std::vector<double> k(counts.size(), 0.0);
  const std::size_t n = num_states;
  for (std::size_t r = 0; n > 0 && r * n < counts.size(); ++r) {
    std::uint64_t total = 0;
    for (std::size_t t = 0; t < n; ++t) total += counts[r * n + t];
    if (total == 0) continue;
    for (std::size_t t = 0; t < n; ++t) {
      k[r * n + t] =
          static_cast<double>(counts[r * n + t]) / static_cast<double>(total);
    }
  }
  return k;
}

}  // namespace rmdp
