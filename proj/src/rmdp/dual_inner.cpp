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

#include "rmdp/dual_inner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "rmdp/error.hpp"
#include "rmdp/model.hpp"
#include "rmdp/spannorm.hpp"

namespace rmdp {
namespace {

// Exponents this close to 1 or this large are handled by the p = 1 and
// p = +inf code paths; the power maps in between lose all precision.
constexpr double kUnitPThreshold = 1.0 + 1e-6;
constexpr double kInfinitePThreshold = 1e6;
constexpr double kLogTMax = 700.0;
constexpr std::uintmax_t kMaxRootIterations = 200;
constexpr int kMaxGoldenSteps = 200;

void check_inputs(std::span<const double> row, std::span<const double> V,
                  double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::NegativeBeta, "radius must be finite and >= 0");
  }
  if (V.empty()) throw Error(ErrorCode::EmptyVector, "empty value vector");
  if (row.size() != V.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "nominal row and value vector differ in length");
  }
  for (double v : V) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteEntry, "value vector has a non-finite entry");
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Normalized {
  double lo = 0.0;
  double range = 0.0;
  std::vector<double> u;
};

Normalized normalize(std::span<const double> V) {
  Normalized n;
  const auto [lo, hi] = std::minmax_element(V.begin(), V.end());
  n.lo = *lo;
  n.range = *hi - *lo;
  n.u.resize(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) {
    n.u[i] = n.range > 0.0 ? (V[i] - n.lo) / n.range : 0.0;
  }
  return n;
}

std::size_t first_argmin(const std::vector<double>& u) {
  return static_cast<std::size_t>(
      std::min_element(u.begin(), u.end()) - u.begin());
}

// All three routes below work on u in [0,1] with min u = 0.
struct UnitSolution {
  double value = 0.0;
  double level = 0.0;
  int iterations = 0;
  std::vector<double> row;
  std::vector<double> dual;  // in normalized units; may be empty
};

UnitSolution vertex_solution(std::span<const double> P0,
                             const std::vector<double>& u) {
  UnitSolution sol;
  sol.row.assign(P0.size(), 0.0);
  sol.row[first_argmin(u)] = 1.0;
  sol.dual.assign(P0.size(), 0.0);
  return sol;
}

// p = 1: the adversary moves beta/2 of mass from the top states down to the
// lowest one. The dual optimum truncates at the smallest level whose
// strictly-higher mass is at most beta/2.
UnitSolution solve_p1(std::span<const double> P0, const std::vector<double>& u,
                      double beta) {
  const std::size_t n = u.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });

  const double budget = 0.5 * beta;
  double above = 0.0;
  double level = 0.0;
  for (std::size_t k = 0; k < n;) {
    const double uk = u[order[k]];
    if (above <= budget) level = uk;
    else break;
    while (k < n && u[order[k]] == uk) above += P0[order[k++]];
  }

  UnitSolution sol;
  sol.level = level;
  sol.dual = truncate(u, level);
  sol.value = dot(P0, sol.dual) - budget * level;

  sol.row.assign(P0.begin(), P0.end());
  double remaining = budget;
  const std::size_t sink = first_argmin(u);
  for (std::size_t k = 0; k < n && remaining > 0.0; ++k) {
    const std::size_t i = order[k];
    if (u[i] == 0.0) break;
    const double moved = std::min(sol.row[i], remaining);
    sol.row[i] -= moved;
    sol.row[sink] += moved;
    remaining -= moved;
  }
  return sol;
}

// p = +inf: Lagrangian dual over the sum constraint,
//   max_nu sum_i min_{d in [-min(beta,P0_i), beta]} (u_i - nu) d,
// concave piecewise linear with kinks at the u_i.
UnitSolution solve_pinf(std::span<const double> P0,
                        const std::vector<double>& u, double beta) {
  const std::size_t n = u.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });

  double suffix_l = 0.0, suffix_lu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = -std::min(beta, P0[i]);
    suffix_l += l;
    suffix_lu += l * u[i];
  }
  double prefix_u = 0.0;
  double best = -kInfinity, best_nu = 0.0;
  for (std::size_t k = 0; k < n;) {
    const double nu = u[order[k]];
    std::size_t j = k;
    double tie_l = 0.0, tie_lu = 0.0, tie_u = 0.0;
    for (; j < n && u[order[j]] == nu; ++j) {
      const double l = -std::min(beta, P0[order[j]]);
      tie_l += l;
      tie_lu += l * nu;
      tie_u += nu;
    }
    suffix_l -= tie_l;
    suffix_lu -= tie_lu;
    const double d = beta * (prefix_u - static_cast<double>(k) * nu) +
                     (suffix_lu - nu * suffix_l);
    if (d > best) {
      best = d;
      best_nu = nu;
    }
    prefix_u += tie_u;
    k = j;
  }

  UnitSolution sol;
  sol.level = best_nu;
  sol.value = dot(P0, u) + best;
  sol.row.assign(P0.begin(), P0.end());
  double balance = 0.0;
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] > best_nu) {
      const double d = -std::min(beta, P0[i]);
      sol.row[i] += d;
      balance += d;
    } else if (u[i] < best_nu) {
      sol.row[i] += beta;
      balance += beta;
    } else {
      ties.push_back(i);
    }
  }
  // States at the optimal level absorb the imbalance within their box.
  for (std::size_t i : ties) {
    const double lo = -std::min(beta, P0[i]);
    const double d = std::clamp(-balance, lo, beta);
    sol.row[i] += d;
    balance += d;
  }
  for (double& x : sol.row) x = std::max(x, 0.0);
  return sol;
}

// 1 < p < inf. Stationarity of the Lagrangian gives
//   Delta_i(t, w) = max(-P0_i, -t psi(u_i - w)),  psi(y) = sign(y)|y|^(q-1),
// with w fixed by sum_i Delta_i = 0 and t by ||Delta||_p = beta. Both scalar
// equations are monotone; t is searched on a log scale.
class KktSolver {
 public:
  KktSolver(std::span<const double> P0, const std::vector<double>& u,
            double beta, Holder h)
      : P0_(P0), u_(u), beta_(beta), h_(h), e_(h.q - 1.0),
        delta_(u.size()) {}

  UnitSolution solve() {
    const std::size_t n = u_.size();
    {
      std::vector<double> d(P0_.begin(), P0_.end());
      for (double& x : d) x = -x;
      d[first_argmin(u_)] += 1.0;
      if (lp_norm(d, h_.p) <= beta_) return vertex_solution(P0_, u_);
    }

    auto g = [&](double s) { return norm_at(std::exp(s)) - beta_; };
    double a = 0.0, fa = g(a);
    double b = a, fb = fa;
    if (fa < 0.0) {
      while (fb < 0.0) {
        a = b;
        fa = fb;
        b += 4.0;
        if (b > kLogTMax) return vertex_solution(P0_, u_);
        fb = g(b);
      }
    } else {
      while (fa > 0.0) {
        b = a;
        fb = fa;
        a -= 4.0;
        if (a < -kLogTMax) break;
        fa = g(a);
      }
    }
    double s = a;
    if (fa == 0.0) {
      s = a;
    } else if (fb == 0.0) {
      s = b;
    } else if (fa < 0.0 && fb > 0.0) {
      std::uintmax_t iters = kMaxRootIterations;
      const auto r = boost::math::tools::toms748_solve(
          g, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50),
          iters);
      s = 0.5 * (r.first + r.second);
    }
    const double t = std::exp(s);
    const double w = omega_at(t);

    UnitSolution sol;
    sol.iterations = evaluations_;
    sol.level = w;
    sol.row.resize(n);
    sol.dual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = step(i, t, w);
      sol.row[i] = std::max(P0_[i] + d, 0.0);
      const bool clipped = d <= -P0_[i];
      sol.dual[i] =
          clipped ? std::min(u_[i], w + std::pow(P0_[i] / t, h_.p - 1.0))
                  : u_[i];
    }
    sol.value = dot(sol.row, u_);
    return sol;
  }

 private:
  double psi(double y) const {
    if (e_ == 1.0) return y;
    return y >= 0.0 ? std::pow(y, e_) : -std::pow(-y, e_);
  }

  double step(std::size_t i, double t, double w) const {
    return std::max(-P0_[i], -t * psi(u_[i] - w));
  }

  double omega_at(double t) {
    if (e_ == 1.0) return omega_projection(t);
    auto f = [&](double w) {
      double s = 0.0;
      for (std::size_t i = 0; i < u_.size(); ++i) s += step(i, t, w);
      return s;
    };
    const double f0 = f(0.0);
    if (f0 >= 0.0) return 0.0;
    const double f1 = f(1.0);
    if (f1 <= 0.0) return 1.0;
    std::uintmax_t iters = kMaxRootIterations;
    const auto r = boost::math::tools::toms748_solve(
        f, 0.0, 1.0, f0, f1, boost::math::tools::eps_tolerance<double>(52),
        iters);
    return 0.5 * (r.first + r.second);
  }

  // q = 2: P0 + Delta is the Euclidean projection of P0 - t u onto the
  // simplex, so w has the usual sort-based closed form.
  double omega_projection(double t) {
    const std::size_t n = u_.size();
    sorted_.resize(n);
    for (std::size_t i = 0; i < n; ++i) sorted_[i] = P0_[i] - t * u_[i];
    std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      cum += sorted_[k];
      const double cand = (1.0 - cum) / static_cast<double>(k + 1);
      if (sorted_[k] + cand > 0.0) theta = cand;
    }
    return theta / t;
  }

  double norm_at(double t) {
    ++evaluations_;
    const double w = omega_at(t);
    for (std::size_t i = 0; i < u_.size(); ++i) delta_[i] = step(i, t, w);
    return lp_norm(delta_, h_.p);
  }

  std::span<const double> P0_;
  const std::vector<double>& u_;
  double beta_;
  Holder h_;
  double e_;
  std::vector<double> delta_;
  std::vector<double> sorted_;
  int evaluations_ = 0;
};

}  // namespace

Holder Holder::from_p(double p) {
  return Holder{p, conjugate_exponent(p)};
}

bool Holder::p_is_one() const { return p < kUnitPThreshold; }

bool Holder::p_is_infinite() const { return p > kInfinitePThreshold; }

std::vector<double> truncate(std::span<const double> V, double level) {
  std::vector<double> out(V.begin(), V.end());
  for (double& x : out) x = std::min(x, level);
  return out;
}

InnerSolution solve_inner(std::span<const double> nominal_row,
                          std::span<const double> V, double beta, Holder h) {
  check_inputs(nominal_row, V, beta);
  InnerSolution out;
  const double nominal = dot(nominal_row, V);
  const Normalized n = normalize(V);
  if (beta == 0.0 || n.range == 0.0) {
    out.kappa = {nominal, n.lo + n.range, 0};
    out.worst_row.assign(nominal_row.begin(), nominal_row.end());
    out.dual_vector.assign(V.begin(), V.end());
    return out;
  }

  UnitSolution sol;
  if (h.p_is_one()) {
    sol = solve_p1(nominal_row, n.u, beta);
  } else if (h.p_is_infinite()) {
    sol = solve_pinf(nominal_row, n.u, beta);
  } else {
    sol = KktSolver(nominal_row, n.u, beta, h).solve();
  }

  const double value = std::clamp(n.lo + n.range * sol.value, n.lo, nominal);
  out.kappa = {value, n.lo + n.range * sol.level, sol.iterations};
  out.worst_row = std::move(sol.row);
  if (!sol.dual.empty()) {
    out.dual_vector.resize(sol.dual.size());
    for (std::size_t i = 0; i < sol.dual.size(); ++i) {
      out.dual_vector[i] = n.lo + n.range * sol.dual[i];
    }
  }
  return out;
}

KappaResult kappa_sa(std::span<const double> nominal_row,
                     std::span<const double> V, double beta, Holder h) {
  return solve_inner(nominal_row, V, beta, h).kappa;
}

std::vector<double> mixed_row(std::span<const double> rows,
                              std::span<const double> pi_s) {
  if (pi_s.empty() || rows.size() % pi_s.size() != 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "rows do not match the action distribution");
  }
  const std::size_t n = rows.size() / pi_s.size();
  std::vector<double> mix(n, 0.0);
  for (std::size_t a = 0; a < pi_s.size(); ++a) {
    if (pi_s[a] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) mix[i] += pi_s[a] * rows[a * n + i];
  }
  return mix;
}

InnerSolution solve_inner_s(std::span<const double> rows,
                            std::span<const double> pi_s,
                            std::span<const double> V, double beta_s,
                            Holder h) {
  check_simplex_row(pi_s, "policy row");
  if (rows.size() != pi_s.size() * V.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "rows do not match the action distribution and value vector");
  }
  if (!(beta_s >= 0.0) || !std::isfinite(beta_s)) {
    throw Error(ErrorCode::NegativeBeta, "radius must be finite and >= 0");
  }
  const std::vector<double> mix = mixed_row(rows, pi_s);
  return solve_inner(mix, V, beta_s * lp_norm(pi_s, h.q), h);
}

KappaResult kappa_s(std::span<const double> rows,
                    std::span<const double> pi_s, std::span<const double> V,
                    double beta_s, Holder h) {
  return solve_inner_s(rows, pi_s, V, beta_s, h).kappa;
}

TruncationOptimum maximize_over_truncation(
    std::span<const double> V, const std::function<double(double)>& objective,
    TruncationSearch search) {
  std::vector<double> levels(V.begin(), V.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  TruncationOptimum best;
  best.level = levels.front();
  best.value = -kInfinity;
  std::vector<double> at(levels.size());
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    at[k] = objective(levels[k]);
    ++best.evaluations;
    if (at[k] > best.value) {
      best = {levels[k], at[k], best.evaluations};
      best_k = k;
    }
  }
  if (levels.size() == 1) return best;

  const double tol = 1e-12 * (levels.back() - levels.front() + 1.0);
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto golden = [&](std::size_t k) {
    double a = levels[k], b = levels[k + 1];
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    best.evaluations += 2;
    for (int i = 0; i < kMaxGoldenSteps && b - a > tol; ++i) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective(d);
      }
      ++best.evaluations;
    }
    const double x = fc >= fd ? c : d;
    const double fx = std::max(fc, fd);
    if (fx > best.value) {
      best.level = x;
      best.value = fx;
    }
  };

  if (search == TruncationSearch::Exhaustive) {
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) golden(k);
  } else {
    if (best_k > 0) golden(best_k - 1);
    if (best_k + 1 < levels.size()) golden(best_k);
  }
  return best;
}

KappaResult truncated_dual_sa(std::span<const double> nominal_row,
                              std::span<const double> V, double beta,
                              Holder h) {
  check_inputs(nominal_row, V, beta);
  auto objective = [&](double level) {
    const std::vector<double> x = truncate(V, level);
    return dot(nominal_row, x) - beta * span_seminorm(x, h.q).value;
  };
  const TruncationOptimum opt =
      maximize_over_truncation(V, objective, TruncationSearch::Exhaustive);
  return {opt.value, opt.level, opt.evaluations};
}

}  // namespace rmdp
