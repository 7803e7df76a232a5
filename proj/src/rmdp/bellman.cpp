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

#include "rmdp/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "rmdp/error.hpp"
#include "rmdp/parallel.hpp"
#include "rmdp/spannorm.hpp"

namespace rmdp {
namespace {

constexpr int kMaxRefinementRounds = 200;
constexpr double kThresholdResidual = 1e-8;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::span<const double> state_rows(const TabularMDP& m, std::size_t s) {
  return {m.row(s, 0).data(), m.num_actions() * m.num_states()};
}

double stopping_threshold(double tol, double gamma) {
  return gamma > 0.0 ? tol * (1.0 - gamma) / (2.0 * gamma) : kInfinity;
}

void check_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
  }
}

void check_policy(const TabularMDP& m, const Policy& pi) {
  if (pi.num_states() != m.num_states() ||
      pi.num_actions() != m.num_actions()) {
    throw Error(ErrorCode::ShapeMismatch, "policy does not fit the model");
  }
}

void check_value(const TabularMDP& m, const ValueFunction& V) {
  if (V.size() != m.num_states()) {
    throw Error(ErrorCode::DimensionMismatch,
                "value function does not fit the model");
  }
}

double sup_diff(const ValueFunction& a, const ValueFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

std::string non_convergence(const char* who, int iterations, double residual) {
  std::ostringstream msg;
  msg << who << ": no convergence after " << iterations
      << " iterations (residual " << residual << ")";
  return msg.str();
}

// Weight of alpha_s in Q(s,a) for the s-rectangular penalty, chosen so that
// sum_a pi(a) w(a) = ||pi||_q.
std::vector<double> penalty_weights(std::span<const double> pi, double q) {
  std::vector<double> w(pi.size(), 0.0);
  if (q == 1.0) {
    std::fill(w.begin(), w.end(), 1.0);
    return w;
  }
  const double top = *std::max_element(pi.begin(), pi.end());
  if (std::isinf(q)) {
    const auto k = std::count(pi.begin(), pi.end(), top);
    for (std::size_t a = 0; a < pi.size(); ++a) {
      if (pi[a] == top) w[a] = 1.0 / static_cast<double>(k);
    }
    return w;
  }
  const double nrm = lp_norm(pi, q);
  for (std::size_t a = 0; a < pi.size(); ++a) {
    w[a] = pi[a] > 0.0 ? std::pow(pi[a] / nrm, q - 1.0) : 0.0;
  }
  return w;
}

double policy_backup_s(const TabularMDP& m, const UncertaintySpec& u,
                       std::span<const double> pis, const ValueFunction& V,
                       std::size_t s, Holder h, InnerSolution* inner_out) {
  InnerSolution inner =
      solve_inner_s(state_rows(m, s), pis, V, u.beta(s), h);
  double v = -lp_norm(pis, h.q) * u.alpha(s);
  for (std::size_t a = 0; a < pis.size(); ++a) v += pis[a] * m.reward(s, a);
  v += m.discount() * inner.kappa.value;
  if (inner_out != nullptr) *inner_out = std::move(inner);
  return v;
}

}  // namespace

double threshold_value(std::span<const double> Q, double sigma, double p) {
  const double top = *std::max_element(Q.begin(), Q.end());
  if (sigma <= 0.0) return top;
  auto residual = [&](double x) {
    double s = 0.0;
    for (double q : Q) {
      if (q > x) s += p == 1.0 ? q - x : std::pow(q - x, p);
    }
    return s;
  };
  const double target = p == 1.0 ? sigma : std::pow(sigma, p);
  auto g = [&](double x) { return residual(x) - target; };
  double lo = top - sigma;
  double glo = g(lo);
  for (int k = 0; glo < 0.0 && k < 60; ++k) {
    lo = top - sigma * (1.0 + std::ldexp(1e-6, k)) - 1e-15;
    glo = g(lo);
  }
  double hi = top, ghi = -target;
  double x = lo;
  if (glo == 0.0) {
    x = lo;
  } else if (glo > 0.0) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(52),
        iters);
    x = std::abs(g(r.first)) <= std::abs(g(r.second)) ? r.first : r.second;
  }
  const double err = std::abs(g(x));
  if (!(err <= kThresholdResidual * std::max(1.0, target))) {
    std::ostringstream msg;
    msg << "threshold equation residual " << err << " after bracketing";
    throw Error(ErrorCode::BisectionFailure, msg.str());
  }
  return x;
}

std::vector<double> threshold_policy(std::span<const double> advantage,
                                     double /*sigma*/, double p) {
  const std::size_t A = advantage.size();
  std::vector<double> pi(A, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    if (p == 1.0) {
      pi[a] = advantage[a] >= 0.0 ? 1.0 : 0.0;
    } else if (advantage[a] > 0.0) {
      pi[a] = std::pow(advantage[a], p - 1.0);
    }
    total += pi[a];
  }
  if (total > 0.0 && std::isfinite(total)) {
    for (double& x : pi) x /= total;
    return pi;
  }
  // No positive advantage: sigma = 0, or sigma below one ulp of max Q so the
  // threshold rounded onto the top action. Either way the argmax carries it.
  const auto best = std::max_element(advantage.begin(), advantage.end());
  if (!(*best >= 0.0)) {
    throw Error(ErrorCode::DegeneratePolicyRow,
                "threshold policy: every advantage is negative");
  }
  std::fill(pi.begin(), pi.end(), 0.0);
  pi[static_cast<std::size_t>(best - advantage.begin())] = 1.0;
  return pi;
}

ValueFunction robust_bellman_policy(const TabularMDP& m,
                                    const UncertaintySpec& u, const Policy& pi,
                                    const ValueFunction& V) {
  u.check_shape(m);
  check_policy(m, pi);
  check_value(m, V);
  const std::size_t A = m.num_actions();
  const double gamma = m.discount();
  const Holder h = Holder::from_p(u.p());
  ValueFunction out(m.num_states());
  parallel_for(m.num_states(), [&](std::size_t s) {
    const auto pis = pi.row(s);
    if (u.mode() == Rectangularity::S) {
      out[s] = policy_backup_s(m, u, pis, V, s, h, nullptr);
      return;
    }
    double v = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      if (pis[a] == 0.0) continue;
      const double kappa = kappa_sa(m.row(s, a), V, u.beta(s, a), h).value;
      v += pis[a] * (m.reward(s, a) - u.alpha(s, a) + gamma * kappa);
    }
    out[s] = v;
  });
  return out;
}

QFunction robust_q(const TabularMDP& m, const UncertaintySpec& u,
                   const Policy& pi, const ValueFunction& V) {
  u.check_shape(m);
  check_policy(m, pi);
  check_value(m, V);
  const std::size_t A = m.num_actions();
  const double gamma = m.discount();
  const Holder h = Holder::from_p(u.p());
  QFunction Q(m.num_states() * A);
  parallel_for(m.num_states(), [&](std::size_t s) {
    if (u.mode() == Rectangularity::SA) {
      for (std::size_t a = 0; a < A; ++a) {
        const double kappa = kappa_sa(m.row(s, a), V, u.beta(s, a), h).value;
        Q[s * A + a] = m.reward(s, a) - u.alpha(s, a) + gamma * kappa;
      }
      return;
    }
    const auto pis = pi.row(s);
    const double kappa =
        kappa_s(state_rows(m, s), pis, V, u.beta(s), h).value;
    const std::vector<double> mix = mixed_row(state_rows(m, s), pis);
    const double adversary = kappa - dot(mix, V);
    const std::vector<double> w = penalty_weights(pis, h.q);
    for (std::size_t a = 0; a < A; ++a) {
      Q[s * A + a] = m.reward(s, a) - w[a] * u.alpha(s) +
                     gamma * dot(m.row(s, a), V) + gamma * adversary;
    }
  });
  return Q;
}

PolicyEvaluation robust_policy_eval(const TabularMDP& m,
                                    const UncertaintySpec& u, const Policy& pi,
                                    double tol, int max_iterations) {
  check_tol(tol);
  const double threshold = stopping_threshold(tol, m.discount());
  PolicyEvaluation out;
  out.V.assign(m.num_states(), 0.0);
  for (int it = 1; it <= max_iterations; ++it) {
    ValueFunction next = robust_bellman_policy(m, u, pi, out.V);
    out.residual = sup_diff(next, out.V);
    out.V = std::move(next);
    out.iterations = it;
    if (out.residual <= threshold) {
      out.Q = robust_q(m, u, pi, out.V);
      return out;
    }
  }
  throw Error(ErrorCode::NonConvergence,
              non_convergence("robust_policy_eval", max_iterations,
                              out.residual));
}

ThresholdSolve s_rect_optimal_backup(const TabularMDP& m,
                                     const UncertaintySpec& u,
                                     const ValueFunction& V, std::size_t s,
                                     std::span<const double> warm_policy) {
  if (u.mode() != Rectangularity::S) {
    throw Error(ErrorCode::ModeMismatch, "s-rectangular backup needs s mode");
  }
  u.check_shape(m);
  check_value(m, V);
  const std::size_t A = m.num_actions();
  const double gamma = m.discount();
  const double alpha_s = u.alpha(s), beta_s = u.beta(s);
  const Holder h = Holder::from_p(u.p());
  ThresholdSolve out;

  if (h.p_is_infinite()) {
    // ||pi||_1 = 1 for every pi: the penalty no longer depends on the policy
    // and the backup is a plain max over actions.
    out.q_values.resize(A);
    for (std::size_t a = 0; a < A; ++a) {
      out.q_values[a] =
          m.reward(s, a) + gamma * kappa_sa(m.row(s, a), V, beta_s, h).value;
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(out.q_values.begin(), out.q_values.end()) -
        out.q_values.begin());
    out.sigma = alpha_s;
    out.x = out.q_values[best] - alpha_s;
    out.advantage.resize(A);
    for (std::size_t a = 0; a < A; ++a) {
      out.advantage[a] = out.q_values[a] - out.x;
    }
    out.policy.assign(A, 0.0);
    out.policy[best] = 1.0;
    out.trunc_level = *std::max_element(V.begin(), V.end());
    return out;
  }

  const double p = h.p_is_one() ? 1.0 : h.p;
  auto assemble = [&](std::span<const double> x_vec, ThresholdSolve& t) {
    t.q_values.resize(A);
    for (std::size_t a = 0; a < A; ++a) {
      t.q_values[a] = m.reward(s, a) + gamma * dot(m.row(s, a), x_vec);
    }
    t.sigma = alpha_s + gamma * beta_s * span_seminorm(x_vec, h.q).value;
    t.x = threshold_value(t.q_values, t.sigma, p);
    t.advantage.resize(A);
    for (std::size_t a = 0; a < A; ++a) {
      t.advantage[a] = t.q_values[a] - t.x;
    }
  };

  // Seed: the best truncation [V]_alpha used as a common dual vector for all
  // policies. Any x <= V gives a lower bound on (T* V)(s).
  ThresholdSolve scratch;
  const TruncationOptimum seed = maximize_over_truncation(
      V,
      [&](double level) {
        assemble(truncate(V, level), scratch);
        return scratch.x;
      },
      TruncationSearch::Local);
  assemble(truncate(V, seed.level), out);
  out.trunc_level = seed.level;
  out.policy = threshold_policy(out.advantage, out.sigma, p);

  std::vector<double> pi = out.policy;
  InnerSolution inner;
  double value = policy_backup_s(m, u, pi, V, s, h, &inner);
  if (!warm_policy.empty()) {
    InnerSolution warm_inner;
    const double warm_value =
        policy_backup_s(m, u, warm_policy, V, s, h, &warm_inner);
    if (warm_value > value) {
      pi.assign(warm_policy.begin(), warm_policy.end());
      value = warm_value;
      inner = std::move(warm_inner);
    }
  }

  // Alternating refinement. For fixed pi the exact dual vector x* solves the
  // inner problem; for fixed x* the threshold rule gives the best pi. Writing
  // v_k for the exact value of pi_k and x_k for the threshold value at x*_k,
  // v_k <= x_k <= v_{k+1}, so both sequences increase to a common limit.
  for (int round = 1; round <= kMaxRefinementRounds; ++round) {
    ThresholdSolve next;
    assemble(inner.dual_vector, next);
    next.policy = threshold_policy(next.advantage, next.sigma, p);
    next.trunc_level = out.trunc_level;
    next.rounds = round;
    const double gap = next.x - value;
    out = std::move(next);
    if (gap <= 1e-13 * (1.0 + std::abs(value))) break;
    pi = out.policy;
    value = policy_backup_s(m, u, pi, V, s, h, &inner);
  }
  return out;
}

ValueFunction robust_bellman_optimal(const TabularMDP& m,
                                     const UncertaintySpec& u,
                                     const ValueFunction& V) {
  u.check_shape(m);
  check_value(m, V);
  const std::size_t A = m.num_actions();
  const double gamma = m.discount();
  const Holder h = Holder::from_p(u.p());
  ValueFunction out(m.num_states());
  parallel_for(m.num_states(), [&](std::size_t s) {
    if (u.mode() == Rectangularity::S) {
      out[s] = s_rect_optimal_backup(m, u, V, s).x;
      return;
    }
    double best = -kInfinity;
    for (std::size_t a = 0; a < A; ++a) {
      const double kappa = kappa_sa(m.row(s, a), V, u.beta(s, a), h).value;
      best = std::max(best, m.reward(s, a) - u.alpha(s, a) + gamma * kappa);
    }
    out[s] = best;
  });
  return out;
}

SolveResult drvi_sa(const TabularMDP& m, const UncertaintySpec& u, double tol,
                    int max_iterations) {
  if (u.mode() != Rectangularity::SA) {
    throw Error(ErrorCode::ModeMismatch, "drvi_sa needs an sa-rectangular set");
  }
  u.check_shape(m);
  check_tol(tol);
  const std::size_t S = m.num_states(), A = m.num_actions();
  const double gamma = m.discount();
  const double threshold = stopping_threshold(tol, gamma);
  const Holder h = Holder::from_p(u.p());

  ValueFunction V(S, 0.0), next(S);
  QFunction Q(S * A);
  auto sweep = [&](const ValueFunction& from) {
    parallel_for(S, [&](std::size_t s) {
      double best = -kInfinity;
      for (std::size_t a = 0; a < A; ++a) {
        const double kappa = kappa_sa(m.row(s, a), from, u.beta(s, a), h).value;
        Q[s * A + a] = m.reward(s, a) - u.alpha(s, a) + gamma * kappa;
        best = std::max(best, Q[s * A + a]);
      }
      next[s] = best;
    });
  };

  double residual = kInfinity;
  int it = 0;
  while (it == 0 || residual > threshold) {
    if (it == max_iterations) {
      throw Error(ErrorCode::NonConvergence,
                  non_convergence("drvi_sa", max_iterations, residual));
    }
    sweep(V);
    residual = sup_diff(next, V);
    V.swap(next);
    ++it;
  }

  // Action values and the greedy policy at the returned V.
  sweep(V);
  std::vector<std::size_t> greedy(S);
  for (std::size_t s = 0; s < S; ++s) {
    const double* row = Q.data() + s * A;
    greedy[s] = static_cast<std::size_t>(std::max_element(row, row + A) - row);
  }
  return SolveResult{std::move(V),
                     std::move(Q),
                     Policy::deterministic(A, greedy),
                     it,
                     residual,
                     gamma < 1.0 ? 2.0 * gamma * residual / (1.0 - gamma)
                                 : kInfinity};
}

SolveResult drvi_s(const TabularMDP& m, const UncertaintySpec& u, double tol,
                   int max_iterations) {
  if (u.mode() != Rectangularity::S) {
    throw Error(ErrorCode::ModeMismatch, "drvi_s needs an s-rectangular set");
  }
  u.check_shape(m);
  check_tol(tol);
  const std::size_t S = m.num_states(), A = m.num_actions();
  const double gamma = m.discount();
  const double threshold = stopping_threshold(tol, gamma);

  ValueFunction V(S, 0.0), next(S);
  std::vector<std::vector<double>> policy(S);
  double residual = kInfinity;
  int it = 0;
  while (it == 0 || residual > threshold) {
    if (it == max_iterations) {
      throw Error(ErrorCode::NonConvergence,
                  non_convergence("drvi_s", max_iterations, residual));
    }
    parallel_for(S, [&](std::size_t s) {
      ThresholdSolve t = s_rect_optimal_backup(m, u, V, s, policy[s]);
      next[s] = t.x;
      policy[s] = std::move(t.policy);
    });
    residual = sup_diff(next, V);
    V.swap(next);
    ++it;
  }

  std::vector<double> probs;
  probs.reserve(S * A);
  for (const auto& row : policy) probs.insert(probs.end(), row.begin(), row.end());
  Policy pi(S, A, std::move(probs));
  QFunction Q = robust_q(m, u, pi, V);
  return SolveResult{std::move(V),
                     std::move(Q),
                     std::move(pi),
                     it,
                     residual,
                     gamma < 1.0 ? 2.0 * gamma * residual / (1.0 - gamma)
                                 : kInfinity};
}

SolveResult drvi(const TabularMDP& m, const UncertaintySpec& u, double tol,
                 int max_iterations) {
  return u.mode() == Rectangularity::SA ? drvi_sa(m, u, tol, max_iterations)
                                        : drvi_s(m, u, tol, max_iterations);
}

}  // namespace rmdp
