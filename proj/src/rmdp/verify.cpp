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

#include "rmdp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "rmdp/bellman.hpp"
#include "rmdp/dual_inner.hpp"
#include "rmdp/error.hpp"
#include "rmdp/model_io.hpp"
#include "rmdp/parallel.hpp"

namespace rmdp {
namespace {

constexpr double kGammas[] = {0.5, 0.9, 0.99};

struct CaseOutcome {
  double error = 0.0;
  bool ok = true;
  std::string detail;
};

CheckResult reduce(std::string name, double tolerance,
                   const std::vector<CaseOutcome>& outcomes) {
  CheckResult r;
  r.name = std::move(name);
  r.cases = outcomes.size();
  r.tolerance = tolerance;
  for (const CaseOutcome& o : outcomes) {
    r.max_error = std::max(r.max_error, o.error);
    if (!o.ok && r.passed) {
      r.passed = false;
      r.detail = o.detail;
    }
  }
  return r;
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

std::string describe(std::size_t S, double p, double beta) {
  std::ostringstream out;
  out << "|S|=" << S << " p=" << format_exponent(p) << " beta=" << beta;
  return out.str();
}

}  // namespace

std::vector<double> random_distribution(SplitMix64& rng, std::size_t n,
                                        bool allow_zeros) {
  std::vector<double> x(n);
  double sum = 0.0;
  for (double& v : x) {
    v = -std::log(rng.uniform_open_low());
    sum += v;
  }
  if (allow_zeros && n > 1) {
    const std::size_t k = static_cast<std::size_t>(rng.next() % n);
    sum -= x[k];
    x[k] = 0.0;
  }
  for (double& v : x) v /= sum;
  return x;
}

std::vector<double> random_vector(SplitMix64& rng, std::size_t n, double lo,
                                  double hi) {
  std::vector<double> x(n);
  for (double& v : x) v = lo + (hi - lo) * rng.uniform();
  return x;
}

Policy random_policy(SplitMix64& rng, std::size_t num_states,
                     std::size_t num_actions) {
  std::vector<double> probs;
  probs.reserve(num_states * num_actions);
  for (std::size_t s = 0; s < num_states; ++s) {
    const auto row = random_distribution(rng, num_actions, rng.uniform() < 0.3);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Policy(num_states, num_actions, std::move(probs));
}

void check_verify_config(const VerifyConfig& c) {
  if (c.max_states < 2) {
    throw Error(ErrorCode::InvalidArgument, "max_states must be >= 2");
  }
  if (c.max_states > kOracleMaxStates) {
    throw Error(ErrorCode::TooManyStates,
                "max_states exceeds the oracle limit of 6");
  }
  if (c.num_actions == 0 || c.count == 0) {
    throw Error(ErrorCode::InvalidArgument, "num_actions and count must be >= 1");
  }
  if (c.p_values.empty() || c.betas.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty p or beta sweep");
  }
  for (double p : c.p_values) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  }
  for (double b : c.betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::NegativeBeta, "beta must be finite and >= 0");
    }
  }
  if (!(c.oracle.resolution > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "resolution must be > 0");
  }
}

std::vector<CheckResult> verify_dual_oracle(const VerifyConfig& c) {
  check_verify_config(c);
  const std::size_t np = c.p_values.size(), nb = c.betas.size();
  const std::size_t sizes = c.max_states - 1;
  std::vector<CaseOutcome> sa(c.count), s_mode(c.count), lower(c.count);
  parallel_for(c.count, [&](std::size_t i) {
    SplitMix64 rng(substream_seed(c.seed, 0xD0A1, i));
    const double p = c.p_values[i % np];
    const double beta = c.betas[(i / np) % nb];
    const std::size_t S = 2 + (i / (np * nb)) % sizes;
    const Holder h = Holder::from_p(p);
    const std::vector<double> V = random_vector(rng, S, 0.0, 10.0);
    const double bound = 1e-4 + static_cast<double>(S) *
                                    c.oracle.resolution * sup_norm(V);

    const std::vector<double> row = random_distribution(rng, S, i % 3 == 0);
    const double dual = kappa_sa(row, V, beta, h).value;
    const double brute = brute_kappa(row, V, beta, p, c.oracle);

    const std::size_t A = c.num_actions;
    std::vector<double> rows;
    for (std::size_t a = 0; a < A; ++a) {
      const auto r = random_distribution(rng, S, (i + a) % 4 == 0);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    const std::vector<double> pi = random_distribution(rng, A);
    const double dual_s = kappa_s(rows, pi, V, beta, h).value;
    const double brute_s = brute_kappa_s(rows, pi, V, beta, p, c.oracle);

    const std::string where = describe(S, p, beta);
    sa[i].error = std::abs(dual - brute);
    sa[i].ok = sa[i].error <= bound;
    sa[i].detail = where + ": kappa_sa " + std::to_string(dual) +
                   " vs oracle " + std::to_string(brute);
    s_mode[i].error = std::abs(dual_s - brute_s);
    s_mode[i].ok = s_mode[i].error <= bound;
    s_mode[i].detail = where + ": kappa_s " + std::to_string(dual_s) +
                       " vs oracle " + std::to_string(brute_s);
    lower[i].error = std::max({0.0, dual - brute, dual_s - brute_s});
    lower[i].ok = lower[i].error <= 1e-9;
    lower[i].detail = where + ": dual value above a feasible oracle point";
  });
  const double tol = 1e-4 + static_cast<double>(c.max_states) *
                                c.oracle.resolution * 10.0;
  return {reduce("dual-oracle kappa_sa", tol, sa),
          reduce("dual-oracle kappa_s", tol, s_mode),
          reduce("dual <= oracle", 1e-9, lower)};
}

std::vector<CheckResult> verify_contraction(const VerifyConfig& c) {
  check_verify_config(c);
  std::vector<CheckResult> out;
  for (Rectangularity mode : {Rectangularity::SA, Rectangularity::S}) {
    for (bool optimal : {false, true}) {
      std::vector<CaseOutcome> cases(c.count);
      const std::uint64_t key = (mode == Rectangularity::SA ? 0 : 2) +
                                (optimal ? 1 : 0);
      parallel_for(c.count, [&](std::size_t i) {
        SplitMix64 rng(substream_seed(c.seed, 0xC0 + key, i));
        const std::size_t S = 2 + i % (c.max_states - 1);
        const std::size_t A = c.num_actions;
        const double gamma = kGammas[i % 3];
        const double p = c.p_values[(i / 3) % c.p_values.size()];
        const double beta = c.betas[(i / 7) % c.betas.size()];
        const TabularMDP m = random_mdp(S, A, gamma, rng.next());
        const UncertaintySpec u =
            UncertaintySpec::uniform(mode, p, beta, 0.1 * rng.uniform(), S, A);
        const std::vector<double> V1 = random_vector(rng, S, -5.0, 15.0);
        std::vector<double> V2 = random_vector(rng, S, -5.0, 15.0);
        if (i % 2 == 0) {
          for (std::size_t k = 0; k < S; ++k) {
            V2[k] = V1[k] + 1e-3 * (rng.uniform() - 0.5);
          }
        }
        ValueFunction T1, T2;
        if (optimal) {
          T1 = robust_bellman_optimal(m, u, V1);
          T2 = robust_bellman_optimal(m, u, V2);
        } else {
          const Policy pi = random_policy(rng, S, A);
          T1 = robust_bellman_policy(m, u, pi, V1);
          T2 = robust_bellman_policy(m, u, pi, V2);
        }
        const double excess = sup_diff(T1, T2) - gamma * sup_diff(V1, V2);
        cases[i].error = std::max(0.0, excess);
        cases[i].ok = excess <= 1e-10;
        cases[i].detail = describe(S, p, beta) + " gamma=" +
                          std::to_string(gamma) + ": excess " +
                          std::to_string(excess);
      });
      out.push_back(reduce(std::string("contraction ") + to_string(mode) +
                               (optimal ? " T*" : " T^pi"),
                           1e-10, cases));
    }
  }
  return out;
}

std::vector<CheckResult> verify_lipschitz(const VerifyConfig& c) {
  check_verify_config(c);
  std::vector<CaseOutcome> sa(c.count), s_mode(c.count);
  parallel_for(c.count, [&](std::size_t i) {
    SplitMix64 rng(substream_seed(c.seed, 0x1195, i));
    const std::size_t S = 2 + i % (c.max_states - 1);
    const std::size_t A = c.num_actions;
    const double p = c.p_values[(i / 2) % c.p_values.size()];
    const double beta = c.betas[(i / 3) % c.betas.size()];
    const Holder h = Holder::from_p(p);
    const std::vector<double> V1 = random_vector(rng, S, 0.0, 10.0);
    std::vector<double> V2 = random_vector(rng, S, 0.0, 10.0);
    if (i % 2 == 0) {
      for (std::size_t k = 0; k < S; ++k) V2[k] = V1[k] + 0.01 * rng.uniform();
    }
    const double dv = sup_diff(V1, V2);
    const auto row = random_distribution(rng, S, i % 3 == 0);
    const double d1 = std::abs(kappa_sa(row, V1, beta, h).value -
                               kappa_sa(row, V2, beta, h).value) - dv;
    std::vector<double> rows;
    for (std::size_t a = 0; a < A; ++a) {
      const auto r = random_distribution(rng, S);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    const auto pi = random_distribution(rng, A);
    const double d2 = std::abs(kappa_s(rows, pi, V1, beta, h).value -
                               kappa_s(rows, pi, V2, beta, h).value) - dv;
    sa[i] = {std::max(0.0, d1), d1 <= 1e-9,
             describe(S, p, beta) + ": excess " + std::to_string(d1)};
    s_mode[i] = {std::max(0.0, d2), d2 <= 1e-9,
                 describe(S, p, beta) + ": excess " + std::to_string(d2)};
  });
  return {reduce("lipschitz kappa_sa", 1e-9, sa),
          reduce("lipschitz kappa_s", 1e-9, s_mode)};
}

std::vector<CheckResult> verify_monotonicity(const VerifyConfig& c,
                                             std::size_t num_models) {
  check_verify_config(c);
  constexpr double kBetas[] = {0.0, 0.05, 0.1, 0.2};
  std::vector<CheckResult> out;
  for (Rectangularity mode : {Rectangularity::SA, Rectangularity::S}) {
    std::vector<CaseOutcome> cases(num_models);
    parallel_for(num_models, [&](std::size_t i) {
      SplitMix64 rng(substream_seed(c.seed, 0x3070, i));
      const std::size_t S = 2 + i % (c.max_states - 1);
      const std::size_t A = c.num_actions;
      const double p = c.p_values[i % c.p_values.size()];
      const TabularMDP m = random_mdp(S, A, 0.9, rng.next());
      ValueFunction previous;
      double worst = 0.0;
      std::string detail;
      for (double beta : kBetas) {
        const UncertaintySpec u =
            UncertaintySpec::uniform(mode, p, beta, 0.0, S, A);
        const ValueFunction V = drvi(m, u, 1e-11).V;
        if (!previous.empty()) {
          for (std::size_t s = 0; s < S; ++s) {
            const double rise = V[s] - previous[s];
            if (rise > worst) {
              worst = rise;
              detail = describe(S, p, beta) + ": V rose by " +
                       std::to_string(rise) + " at state " + std::to_string(s);
            }
          }
        }
        previous = V;
      }
      cases[i] = {worst, worst <= 1e-9, detail};
    });
    out.push_back(reduce(std::string("monotone in beta ") + to_string(mode),
                         1e-9, cases));
  }
  return out;
}

std::vector<CheckResult> verify_all(const VerifyConfig& c) {
  std::vector<CheckResult> all = verify_dual_oracle(c);
  for (auto* suite : {&verify_contraction, &verify_lipschitz}) {
    auto part = suite(c);
    all.insert(all.end(), part.begin(), part.end());
  }
  auto mono = verify_monotonicity(c);
  all.insert(all.end(), mono.begin(), mono.end());
  return all;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "check"
      << "  cases  max_error   tolerance   result\n";
  for (const auto& r : results) {
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  "
        << std::right << std::setw(5) << r.cases << "  " << std::scientific
        << std::setprecision(3) << r.max_error << "  " << r.tolerance << "   "
        << (r.passed ? "PASS" : "FAIL") << std::defaultfloat << '\n';
    if (!r.passed) out << "  first failure: " << r.detail << '\n';
  }
  return out.str();
}

}  // namespace rmdp
