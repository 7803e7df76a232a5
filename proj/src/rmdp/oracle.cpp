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

#include "rmdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "rmdp/error.hpp"
#include "rmdp/parallel.hpp"
#include "rmdp/rng.hpp"

namespace rmdp {
namespace {

constexpr double kStallTolerance = 1e-13;
constexpr int kMaxRobustSweeps = 100000;

double norm_p(std::span<const double> d, double p) {
  double m = 0.0;
  for (double x : d) m = std::max(m, std::abs(x));
  if (std::isinf(p) || m == 0.0) return m;
  double s = 0.0;
  for (double x : d) s += std::pow(std::abs(x) / m, p);
  return m * std::pow(s, 1.0 / p);
}

double dual_exponent(double p) {
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_kappa_inputs(std::span<const double> row, std::span<const double> V,
                        double beta, double p) {
  if (V.size() > kOracleMaxStates) {
    throw Error(ErrorCode::TooManyStates, "oracle supports at most 6 states");
  }
  if (V.empty() || row.size() != V.size()) {
    throw Error(ErrorCode::DimensionMismatch, "oracle: size mismatch");
  }
  if (!(beta >= 0.0)) throw Error(ErrorCode::NegativeBeta, "oracle: beta < 0");
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "oracle: p < 1");
}

// Moves up to beta/2 of mass from the highest-valued states onto the lowest.
double greedy_transport(std::span<const double> P0, std::span<const double> V,
                        double beta) {
  const std::size_t n = V.size();
  std::vector<double> P(P0.begin(), P0.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return V[a] > V[b]; });
  const std::size_t sink = order.back();
  double budget = 0.5 * beta;
  for (std::size_t k = 0; k + 1 < n && budget > 0.0; ++k) {
    const std::size_t i = order[k];
    if (V[i] <= V[sink]) break;
    const double m = std::min(P[i], budget);
    P[i] -= m;
    P[sink] += m;
    budget -= m;
  }
  return dot(P, V);
}

// Each coordinate may move by at most beta. Receivers are filled from the
// cheapest state up, givers drained from the dearest down, until the two
// fronts meet.
double saturate(std::span<const double> P0, std::span<const double> V,
                double beta) {
  const std::size_t n = V.size();
  std::vector<double> P(P0.begin(), P0.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return V[a] < V[b]; });
  std::size_t i = 0, j = n - 1;
  double recv = beta, give = std::min(beta, P0[order[j]]);
  while (i < j && V[order[i]] < V[order[j]]) {
    const double m = std::min(recv, give);
    P[order[i]] += m;
    P[order[j]] -= m;
    recv -= m;
    give -= m;
    if (recv <= 0.0) {
      ++i;
      recv = beta;
    }
    if (give <= 0.0) {
      --j;
      give = std::min(beta, P0[order[j]]);
    }
  }
  for (double& x : P) x = std::max(x, 0.0);
  return dot(P, V);
}

// Solves w + c w^(p-1) = y for w in [0, y].
double shrink_coordinate(double y, double c, double p) {
  if (y == 0.0) return 0.0;
  if (p == 2.0) return y / (1.0 + c);
  if (p == 3.0) return 2.0 * y / (1.0 + std::sqrt(1.0 + 4.0 * c * y));
  if (p == 1.5) {
    const double s = 2.0 * y / (c + std::sqrt(c * c + 4.0 * y));
    return s * s;
  }
  double lo = 0.0, hi = y;
  for (int k = 0; k < 100 && hi - lo > 1e-17; ++k) {
    const double w = 0.5 * (lo + hi);
    if (w + c * std::pow(w, p - 1.0) > y) hi = w;
    else lo = w;
  }
  return lo;
}

// Projected gradient over B stacked rows, each in the simplex, with
// ||x - center||_p <= radius over the whole stack.
class StackedProblem {
 public:
  StackedProblem(std::size_t blocks, std::span<const double> center,
                 std::span<const double> gradient, double radius, double p,
                 const OracleOptions& options)
      : blocks_(blocks),
        n_(center.size() / blocks),
        center_(center.begin(), center.end()),
        grad_(gradient.begin(), gradient.end()),
        radius_(radius),
        p_(p),
        options_(options) {
    // Constant shifts within a block do not change the projected step.
    double scale = 0.0;
    for (std::size_t b = 0; b < blocks_; ++b) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n_; ++i) mean += grad_[b * n_ + i];
      mean /= static_cast<double>(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        grad_[b * n_ + i] -= mean;
        scale = std::max(scale, std::abs(grad_[b * n_ + i]));
      }
    }
    step_ = scale > 0.0 ? 0.1 / scale : 0.0;
  }

  double solve() {
    double best = score(feasible(center_));
    if (step_ == 0.0) return best;
    SplitMix64 rng(options_.seed);
    for (int k = 0; k < options_.starts; ++k) {
      std::vector<double> x = k == 0 ? center_ : random_start(rng);
      for (int it = 0; it < options_.pgd_iterations; ++it) {
        std::vector<double> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= step_ * grad_[i];
        std::vector<double> next = dykstra(y);
        double moved = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          moved = std::max(moved, std::abs(next[i] - x[i]));
        }
        x = std::move(next);
        if (moved < kStallTolerance) break;
      }
      best = std::min(best, score(feasible(x)));
    }
    return best;
  }

  double score(const std::vector<double>& x) const { return dot(x, grad_); }

  bool in_ball(std::span<const double> x) const {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - center_[i];
    return norm_p(d, p_) <= radius_;
  }

 private:
  std::vector<double> simplex_blocks(std::span<const double> y) const {
    std::vector<double> out(y.size());
    for (std::size_t b = 0; b < blocks_; ++b) {
      const auto part = project_simplex(y.subspan(b * n_, n_));
      std::copy(part.begin(), part.end(), out.begin() + b * n_);
    }
    return out;
  }

  std::vector<double> dykstra(const std::vector<double>& y) const {
    const std::size_t m = y.size();
    std::vector<double> x = y, pp(m, 0.0), qq(m, 0.0), t(m);
    for (int r = 0; r < options_.projection_rounds; ++r) {
      for (std::size_t i = 0; i < m; ++i) t[i] = x[i] + pp[i];
      const std::vector<double> a = simplex_blocks(t);
      for (std::size_t i = 0; i < m; ++i) {
        pp[i] = t[i] - a[i];
        t[i] = a[i] + qq[i];
      }
      const std::vector<double> b = project_lp_ball(t, center_, radius_, p_);
      double moved = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        qq[i] = t[i] - b[i];
        moved = std::max(moved, std::abs(b[i] - x[i]));
      }
      x = b;
      if (moved < 1e-15) break;
    }
    return x;
  }

  // Simplex projection followed by a radial pull toward the center. The pull
  // is a convex combination of two stacked simplex points, so the result is
  // exactly feasible.
  std::vector<double> feasible(std::span<const double> x) const {
    std::vector<double> s = simplex_blocks(x);
    std::vector<double> d(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) d[i] = s[i] - center_[i];
    double nrm = norm_p(d, p_);
    double shrink = 1.0;
    while (nrm * shrink > radius_) {
      shrink = shrink == 1.0 ? radius_ / nrm : shrink * (1.0 - 1e-15);
    }
    if (shrink < 1.0) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = center_[i] + shrink * d[i];
      }
    }
    return s;
  }

  std::vector<double> random_start(SplitMix64& rng) const {
    std::vector<double> y(center_.size());
    for (std::size_t b = 0; b < blocks_; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        y[b * n_ + i] = -std::log(rng.uniform_open_low());
        sum += y[b * n_ + i];
      }
      for (std::size_t i = 0; i < n_; ++i) y[b * n_ + i] /= sum;
    }
    std::vector<double> d(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) d[i] = y[i] - center_[i];
    const double nrm = norm_p(d, p_);
    double scale = rng.uniform();
    if (nrm > radius_) scale *= radius_ / nrm;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = center_[i] + scale * d[i];
    }
    return y;
  }

  std::size_t blocks_;
  std::size_t n_;
  std::vector<double> center_;
  std::vector<double> grad_;
  double radius_;
  double p_;
  const OracleOptions& options_;
  double step_ = 0.0;
};

std::size_t grid_size(std::size_t ticks, std::size_t states) {
  // C(ticks + states - 1, states - 1), saturating.
  double c = 1.0;
  for (std::size_t k = 1; k < states; ++k) {
    c = c * static_cast<double>(ticks + k) / static_cast<double>(k);
    if (c > 1e18) return static_cast<std::size_t>(-1);
  }
  return static_cast<std::size_t>(std::llround(c));
}

// Minimum of P . V over simplex points with coordinates on the grid
// {0, 1/K, ..., 1} that lie inside the ball.
double grid_search(std::span<const double> P0, std::span<const double> V,
                   double beta, double p, std::size_t ticks) {
  const std::size_t n = V.size();
  std::vector<std::size_t> k(n, 0);
  std::vector<double> x(n), d(n);
  double best = kInfinity;
  const double inv = 1.0 / static_cast<double>(ticks);
  auto visit = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(k[i]) * inv;
      d[i] = x[i] - P0[i];
    }
    if (norm_p(d, p) <= beta) best = std::min(best, dot(x, V));
  };
  // Enumerate compositions of `ticks` into n parts.
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i + 1 == n) {
      k[i] = left;
      visit();
      return;
    }
    for (std::size_t t = 0; t <= left; ++t) {
      k[i] = t;
      self(self, i + 1, left - t);
    }
  };
  rec(rec, 0, ticks);
  return best;
}

}  // namespace

std::vector<double> project_simplex(std::span<const double> y) {
  std::vector<double> s(y.begin(), y.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cum += s[k];
    const double cand = (1.0 - cum) / static_cast<double>(k + 1);
    if (s[k] + cand > 0.0) theta = cand;
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = std::max(y[i] + theta, 0.0);
  }
  return out;
}

std::vector<double> project_lp_ball(std::span<const double> y,
                                    std::span<const double> center,
                                    double radius, double p) {
  const std::size_t n = y.size();
  std::vector<double> d(n), out(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - center[i];
  if (norm_p(d, p) <= radius) return {y.begin(), y.end()};

  std::vector<double> w(n);
  if (std::isinf(p)) {
    for (std::size_t i = 0; i < n; ++i) w[i] = std::min(std::abs(d[i]), radius);
  } else if (p == 1.0) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(d[i]);
    std::vector<double> s = a;
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      cum += s[k];
      const double cand = (cum - radius) / static_cast<double>(k + 1);
      if (s[k] > cand) theta = cand;
    }
    for (std::size_t i = 0; i < n; ++i) w[i] = std::max(a[i] - theta, 0.0);
  } else if (p == 2.0) {
    const double scale = radius / norm_p(d, 2.0);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::abs(d[i]) * scale;
  } else {
    // Stationarity: w_i + lambda p w_i^(p-1) = |d_i|; lambda set by the norm.
    auto fill = [&](double lambda) {
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = shrink_coordinate(std::abs(d[i]), lambda * p, p);
      }
    };
    auto excess = [&](double lambda) {
      fill(lambda);
      return norm_p(w, p) - radius;
    };
    double lo = 0.0, hi = 1.0, fhi = excess(hi);
    while (fhi > 0.0) {
      lo = hi;
      hi *= 2.0;
      fhi = excess(hi);
    }
    const double flo = excess(lo);
    if (flo > 0.0 && fhi < 0.0) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(
          excess, lo, hi, flo, fhi,
          boost::math::tools::eps_tolerance<double>(50), iters);
      hi = r.second;
    }
    fill(hi);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = center[i] + (d[i] < 0.0 ? -w[i] : w[i]);
  }
  return out;
}

double brute_kappa(std::span<const double> nominal_row,
                   std::span<const double> V, double beta, double p,
                   const OracleOptions& options) {
  check_kappa_inputs(nominal_row, V, beta, p);
  if (beta == 0.0) return dot(nominal_row, V);
  if (p == 1.0) return greedy_transport(nominal_row, V, beta);
  if (std::isinf(p)) return saturate(nominal_row, V, beta);

  StackedProblem problem(1, nominal_row, V, beta, p, options);
  // The problem works on V shifted to zero mean; shift back.
  double mean = 0.0;
  for (double v : V) mean += v;
  mean /= static_cast<double>(V.size());
  double best = problem.solve() + mean;

  if (!(options.resolution > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "oracle: resolution must be > 0");
  }
  const auto ticks =
      static_cast<std::size_t>(std::llround(1.0 / options.resolution));
  if (ticks >= 1 && grid_size(ticks, V.size()) <= options.grid_cap) {
    best = std::min(best, grid_search(nominal_row, V, beta, p, ticks));
  }
  return best;
}

double brute_kappa(std::span<const double> nominal_row,
                   std::span<const double> V, double beta, double p,
                   double resolution) {
  OracleOptions options;
  options.resolution = resolution;
  return brute_kappa(nominal_row, V, beta, p, options);
}

double brute_kappa_s(std::span<const double> rows,
                     std::span<const double> pi_s, std::span<const double> V,
                     double beta_s, double p, const OracleOptions& options) {
  if (pi_s.empty() || rows.size() != pi_s.size() * V.size()) {
    throw Error(ErrorCode::DimensionMismatch, "oracle: size mismatch");
  }
  const std::size_t n = V.size();
  std::vector<double> mix(n, 0.0);
  for (std::size_t a = 0; a < pi_s.size(); ++a) {
    for (std::size_t i = 0; i < n; ++i) mix[i] += pi_s[a] * rows[a * n + i];
  }
  const double radius = beta_s * norm_p(pi_s, dual_exponent(p));
  return brute_kappa(mix, V, radius, p, options);
}

double brute_kappa_s_joint(std::span<const double> rows,
                           std::span<const double> pi_s,
                           std::span<const double> V, double beta_s, double p,
                           const OracleOptions& options) {
  if (pi_s.empty() || rows.size() != pi_s.size() * V.size()) {
    throw Error(ErrorCode::DimensionMismatch, "oracle: size mismatch");
  }
  check_kappa_inputs(rows.subspan(0, V.size()), V, beta_s, p);
  const std::size_t n = V.size();
  std::vector<double> grad(rows.size());
  double shift = 0.0;
  for (std::size_t a = 0; a < pi_s.size(); ++a) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += pi_s[a] * V[i];
    mean /= static_cast<double>(n);
    shift += mean;
    for (std::size_t i = 0; i < n; ++i) grad[a * n + i] = pi_s[a] * V[i];
  }
  StackedProblem problem(pi_s.size(), rows, grad, beta_s, p, options);
  return problem.solve() + shift;
}

ValueFunction brute_robust_value(const TabularMDP& m, const UncertaintySpec& u,
                                 const Policy& pi, double tol,
                                 const OracleOptions& options,
                                 const ValueFunction* warm_start) {
  const std::size_t S = m.num_states(), A = m.num_actions();
  if (S > kRobustOracleMaxStates || A > kRobustOracleMaxActions) {
    throw Error(ErrorCode::TooManyStates,
                "robust oracle supports at most 4 states and 3 actions");
  }
  u.check_shape(m);
  if (pi.num_states() != S || pi.num_actions() != A) {
    throw Error(ErrorCode::ShapeMismatch, "policy does not fit the model");
  }
  const double gamma = m.discount();
  const double threshold =
      gamma > 0.0 ? tol * (1.0 - gamma) / (2.0 * gamma) : kInfinity;
  const double p = u.p();
  const double q = dual_exponent(p);

  ValueFunction V =
      warm_start != nullptr ? *warm_start : ValueFunction(S, 0.0);
  ValueFunction next(S);
  for (int sweep = 0; sweep < kMaxRobustSweeps; ++sweep) {
    parallel_for(S, [&](std::size_t s) {
      const auto pis = pi.row(s);
      double v = 0.0;
      if (u.mode() == Rectangularity::SA) {
        for (std::size_t a = 0; a < A; ++a) {
          if (pis[a] == 0.0) continue;
          v += pis[a] * (m.reward(s, a) - u.alpha(s, a) +
                         gamma * brute_kappa(m.row(s, a), V, u.beta(s, a), p,
                                             options));
        }
      } else {
        const std::span<const double> rows(m.row(s, 0).data(), A * S);
        v = -norm_p(pis, q) * u.alpha(s);
        for (std::size_t a = 0; a < A; ++a) v += pis[a] * m.reward(s, a);
        v += gamma * brute_kappa_s(rows, pis, V, u.beta(s), p, options);
      }
      next[s] = v;
    });
    double diff = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      diff = std::max(diff, std::abs(next[s] - V[s]));
    }
    V.swap(next);
    if (diff <= threshold) return V;
  }
  throw Error(ErrorCode::NonConvergence, "robust oracle did not converge");
}

ExhaustiveResult exhaustive_sa_optimum(const TabularMDP& m,
                                       const UncertaintySpec& u, double tol,
                                       const OracleOptions& options) {
  if (u.mode() != Rectangularity::SA) {
    throw Error(ErrorCode::ModeMismatch, "exhaustive search needs sa mode");
  }
  const std::size_t S = m.num_states(), A = m.num_actions();
  std::size_t count = 1;
  for (std::size_t s = 0; s < S; ++s) {
    count *= A;
    if (count > kMaxEnumeratedPolicies) {
      throw Error(ErrorCode::TooManyPolicies,
                  "more than 64 deterministic policies");
    }
  }
  std::optional<ExhaustiveResult> best;
  double best_total = -kInfinity;
  std::vector<std::size_t> actions(S);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t code = k;
    for (std::size_t s = 0; s < S; ++s) {
      actions[s] = code % A;
      code /= A;
    }
    Policy pi = Policy::deterministic(A, actions);
    ValueFunction V = brute_robust_value(m, u, pi, tol, options);
    const double total = std::accumulate(V.begin(), V.end(), 0.0);
    if (total > best_total) {
      best_total = total;
      best.emplace(ExhaustiveResult{std::move(pi), std::move(V)});
    }
  }
  return std::move(*best);
}

ValueFunction classical_policy_eval(const TabularMDP& m, const Policy& pi) {
  const std::size_t S = m.num_states(), A = m.num_actions();
  if (pi.num_states() != S || pi.num_actions() != A) {
    throw Error(ErrorCode::ShapeMismatch, "policy does not fit the model");
  }
  const double gamma = m.discount();
  // Gaussian elimination with partial pivoting on (I - gamma P_pi) V = r_pi.
  std::vector<double> M(S * (S + 1), 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    M[s * (S + 1) + s] = 1.0;
    for (std::size_t a = 0; a < A; ++a) {
      const double w = pi(s, a);
      if (w == 0.0) continue;
      const auto row = m.row(s, a);
      for (std::size_t t = 0; t < S; ++t) {
        M[s * (S + 1) + t] -= gamma * w * row[t];
      }
      M[s * (S + 1) + S] += w * m.reward(s, a);
    }
  }
  for (std::size_t c = 0; c < S; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < S; ++r) {
      if (std::abs(M[r * (S + 1) + c]) > std::abs(M[piv * (S + 1) + c])) piv = r;
    }
    if (piv != c) {
      for (std::size_t k = 0; k <= S; ++k) {
        std::swap(M[c * (S + 1) + k], M[piv * (S + 1) + k]);
      }
    }
    for (std::size_t r = 0; r < S; ++r) {
      if (r == c) continue;
      const double f = M[r * (S + 1) + c] / M[c * (S + 1) + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k <= S; ++k) {
        M[r * (S + 1) + k] -= f * M[c * (S + 1) + k];
      }
    }
  }
  ValueFunction V(S);
  for (std::size_t s = 0; s < S; ++s) {
    V[s] = M[s * (S + 1) + S] / M[s * (S + 1) + s];
  }
  return V;
}

ClassicalSolution classical_value_iteration(const TabularMDP& m, double tol) {
  const std::size_t S = m.num_states(), A = m.num_actions();
  const double gamma = m.discount();
  const double threshold =
      gamma > 0.0 ? tol * (1.0 - gamma) / (2.0 * gamma) : kInfinity;
  ClassicalSolution out;
  out.V.assign(S, 0.0);
  out.Q.assign(S * A, 0.0);
  ValueFunction next(S);
  for (int it = 1; it <= 1'000'000; ++it) {
    double diff = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      double best = -kInfinity;
      for (std::size_t a = 0; a < A; ++a) {
        const double q = m.reward(s, a) + gamma * dot(m.row(s, a), out.V);
        out.Q[s * A + a] = q;
        best = std::max(best, q);
      }
      next[s] = best;
      diff = std::max(diff, std::abs(best - out.V[s]));
    }
    out.V.swap(next);
    out.iterations = it;
    if (diff <= threshold) {
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          out.Q[s * A + a] = m.reward(s, a) + gamma * dot(m.row(s, a), out.V);
        }
      }
      return out;
    }
  }
  throw Error(ErrorCode::NonConvergence, "value iteration did not converge");
}

}  // namespace rmdp
