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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rmdp/dual_inner.hpp"
#include "rmdp/error.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/rng.hpp"
#include "rmdp/spannorm.hpp"
#include "rmdp/verify.hpp"

namespace rmdp {
namespace {

constexpr double kPs[] = {1.0, 1.5, 2.0, 3.0, kInfinity};

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

TEST_CASE("truncate") {
  CHECK(truncate(std::vector<double>{0, 2, 5}, 3.0) ==
        std::vector<double>{0, 2, 3});
  CHECK(truncate(std::vector<double>{0, 2, 5}, 9.0) ==
        std::vector<double>{0, 2, 5});
  CHECK(truncate(std::vector<double>{1, 2, 5}, 0.5) ==
        std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("kappa_sa examples") {
  const std::vector<double> row{0.2, 0.3, 0.5}, V{1.0, 4.0, 2.0};
  for (double p : kPs) {
    CAPTURE(p);
    const Holder h = Holder::from_p(p);
    const KappaResult zero = kappa_sa(row, V, 0.0, h);
    CHECK(zero.value == doctest::Approx(dot(row, V)).epsilon(1e-14));
    CHECK(zero.trunc_level == 4.0);
    CHECK(kappa_sa(row, std::vector<double>{2.5, 2.5, 2.5}, 0.7, h).value ==
          doctest::Approx(2.5));
  }
  const std::vector<double> half{0.5, 0.5}, V01{0.0, 1.0};
  CHECK(kappa_sa(half, V01, 2.0, Holder::from_p(1.0)).value ==
        doctest::Approx(0.0));
  CHECK(brute_kappa(half, V01, 2.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("kappa_sa matches the oracle on 3-state rows") {
  SplitMix64 rng(12);
  for (int k = 0; k < 30; ++k) {
    const auto row = random_distribution(rng, 3, k % 4 == 0);
    const auto V = random_vector(rng, 3, 0.0, 1.0);
    for (double p : {1.0, 2.0, kInfinity}) {
      for (double beta : {0.05, 0.3}) {
        CAPTURE(p);
        CAPTURE(beta);
        OracleOptions o;
        o.starts = 10;
        const double brute = brute_kappa(row, V, beta, p, o);
        const double dual = kappa_sa(row, V, beta, Holder::from_p(p)).value;
        CHECK(std::abs(dual - brute) <= 1e-4);
        CHECK(dual <= brute + 1e-12);
      }
    }
  }
}

TEST_CASE("inner solution is a feasible certificate") {
  SplitMix64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 6;
    const double p = kPs[k % 5];
    const double beta = std::array{0.0, 0.02, 0.2, 0.8, 3.0}[(k / 5) % 5];
    CAPTURE(n);
    CAPTURE(p);
    CAPTURE(beta);
    const auto row = random_distribution(rng, n, k % 3 == 0);
    const auto V = random_vector(rng, n, -2.0, 6.0);
    const Holder h = Holder::from_p(p);
    const InnerSolution sol = solve_inner(row, V, beta, h);
    double sum = 0.0;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(sol.worst_row[i] >= -1e-12);
      sum += sol.worst_row[i];
      d[i] = sol.worst_row[i] - row[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(d, p) <= beta * (1 + 1e-9) + 1e-12);
    CHECK(dot(sol.worst_row, V) ==
          doctest::Approx(sol.kappa.value).epsilon(1e-9));
    const auto [lo, hi] = std::minmax_element(V.begin(), V.end());
    CHECK(sol.kappa.value >= *lo - 1e-12);
    CHECK(sol.kappa.value <= dot(row, V) + 1e-12);
    if (!h.p_is_infinite()) {
      REQUIRE(sol.dual_vector.size() == n);
      const double bound = dot(row, sol.dual_vector) -
                           beta * span_seminorm(sol.dual_vector, h.q).value;
      CHECK(bound == doctest::Approx(sol.kappa.value).epsilon(1e-8));
    }
  }
}

TEST_CASE("truncation dual is a lower bound, exact at p = 1") {
  SplitMix64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 5;
    const double p = kPs[k % 5];
    const auto row = random_distribution(rng, n);
    const auto V = random_vector(rng, n, 0.0, 3.0);
    const Holder h = Holder::from_p(p);
    const double exact = kappa_sa(row, V, 0.3, h).value;
    const double trunc = truncated_dual_sa(row, V, 0.3, h).value;
    CHECK(trunc <= exact + 1e-9);
    if (h.p_is_one()) CHECK(trunc == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("non-increasing in beta and 1-Lipschitz in V") {
  SplitMix64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 5;
    const Holder h = Holder::from_p(kPs[k % 5]);
    const auto row = random_distribution(rng, n);
    const auto V = random_vector(rng, n, 0.0, 3.0);
    double previous = kInfinity;
    for (double beta : {0.0, 0.05, 0.1, 0.4, 1.0, 2.5}) {
      const double v = kappa_sa(row, V, beta, h).value;
      CHECK(v <= previous + 1e-12);
      previous = v;
    }
    auto W = V;
    double dv = 0.0;
    for (double& w : W) {
      const double e = 0.1 * (rng.uniform() - 0.5);
      w += e;
      dv = std::max(dv, std::abs(e));
    }
    CHECK(std::abs(kappa_sa(row, V, 0.3, h).value -
                   kappa_sa(row, W, 0.3, h).value) <= dv + 1e-9);
  }
}

TEST_CASE("kappa_s") {
  const std::vector<double> rows{0.5, 0.5, 0.0, 0.1, 0.2, 0.7};
  const std::vector<double> pi{0.25, 0.75}, V{1.0, 0.0, 3.0};
  const auto mixed = mixed_row(rows, pi);
  CHECK(mixed[0] == doctest::Approx(0.2));
  CHECK(mixed[2] == doctest::Approx(0.525));
  for (double p : kPs) {
    const Holder h = Holder::from_p(p);
    CHECK(kappa_s(rows, pi, V, 0.0, h).value ==
          doctest::Approx(dot(mixed, V)));
    const double v = kappa_s(rows, pi, V, 0.2, h).value;
    CHECK(v <= dot(mixed, V) + 1e-12);
    OracleOptions o;
    o.starts = 10;
    CHECK(std::abs(v - brute_kappa_s(rows, pi, V, 0.2, p, o)) <= 1e-4);
  }
  CHECK_THROWS_AS(kappa_s(rows, std::vector<double>{0.5, 0.6}, V, 0.1,
                          Holder::from_p(2.0)),
                  Error);
}

TEST_CASE("argument errors") {
  const std::vector<double> row{0.5, 0.5}, V{0.0, 1.0};
  CHECK_THROWS_AS(kappa_sa(row, V, -0.1, Holder::from_p(2.0)), Error);
  CHECK_THROWS_AS(kappa_sa(row, std::vector<double>{1.0}, 0.1,
                           Holder::from_p(2.0)),
                  Error);
}

TEST_CASE("maximize_over_truncation finds the peak of a concave function") {
  const std::vector<double> V{0.0, 1.0, 4.0};
  const auto f = [](double a) { return -(a - 2.5) * (a - 2.5); };
  for (auto mode : {TruncationSearch::Exhaustive, TruncationSearch::Local}) {
    const TruncationOptimum r = maximize_over_truncation(V, f, mode);
    CHECK(r.level == doctest::Approx(2.5).epsilon(1e-6));
  }
}

}  // namespace
}  // namespace rmdp
