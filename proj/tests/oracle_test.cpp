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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "rmdp/bellman.hpp"
#include "rmdp/error.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/rng.hpp"
#include "rmdp/spannorm.hpp"
#include "rmdp/verify.hpp"

namespace rmdp {
namespace {

TEST_CASE("brute_kappa brackets") {
  const std::vector<double> row{1.0 / 3, 1.0 / 3, 1.0 / 3}, V{0, 1, 2};
  CHECK(brute_kappa(row, V, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK(brute_kappa(row, V, 2.0, 1.0) == doctest::Approx(0.0));
  CHECK(brute_kappa(row, V, 5.0, 1.0) == doctest::Approx(0.0));
  const double small = brute_kappa(row, V, 0.1, 2.0);
  const double large = brute_kappa(row, V, 0.3, 2.0);
  CHECK(small <= 1.0);
  CHECK(small >= 0.0);
  CHECK(large <= small);
}

TEST_CASE("resolution halving stays within the bound") {
  SplitMix64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const auto row = random_distribution(rng, 3);
    const auto V = random_vector(rng, 3, 0.0, 1.0);
    const double a = brute_kappa(row, V, 0.2, 1.5, 2e-3);
    const double b = brute_kappa(row, V, 0.2, 1.5, 1e-3);
    CHECK(std::abs(a - b) <= 3 * 2e-3);
  }
}

TEST_CASE("projections") {
  const std::vector<double> y{0.9, 0.8, -0.3};
  const auto s = project_simplex(y);
  CHECK(s[0] + s[1] + s[2] == doctest::Approx(1.0));
  CHECK(s[2] == 0.0);
  CHECK(s[0] - s[1] == doctest::Approx(0.1));
  const std::vector<double> c{0.0, 0.0, 0.0};
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, kInfinity}) {
    const auto b = project_lp_ball(y, c, 0.5, p);
    CHECK(lp_norm(b, p) <= 0.5 + 1e-9);
    const std::vector<double> inside{0.1, 0.1, 0.1};
    CHECK(project_lp_ball(inside, c, 0.5, p) == inside);
  }
}

TEST_CASE("size guards") {
  const std::vector<double> row(7, 1.0 / 7), V(7, 1.0);
  CHECK_THROWS_AS(brute_kappa(row, V, 0.1, 2.0), Error);
  const TabularMDP big = random_mdp(5, 2, 0.9, 1);
  const auto u = UncertaintySpec::uniform(Rectangularity::SA, 1.0, 0.0, 0.0,
                                          5, 2);
  CHECK_THROWS_AS(brute_robust_value(big, u, Policy::uniform(5, 2), 1e-6),
                  Error);
  const TabularMDP many = random_mdp(4, 3, 0.9, 1);
  const auto u3 = UncertaintySpec::uniform(Rectangularity::SA, 1.0, 0.0, 0.0,
                                           4, 3);
  CHECK_THROWS_AS(exhaustive_sa_optimum(many, u3, 1e-6), Error);
}

TEST_CASE("brute robust value at beta = 0 is classical evaluation") {
  const TabularMDP m = random_mdp(3, 2, 0.8, 4);
  const auto u = UncertaintySpec::uniform(Rectangularity::SA, 2.0, 0.0, 0.0,
                                          3, 2);
  const Policy pi = Policy::uniform(3, 2);
  const ValueFunction brute = brute_robust_value(m, u, pi, 1e-10);
  const ValueFunction exact = classical_policy_eval(m, pi);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(brute[s] == doctest::Approx(exact[s]).epsilon(1e-8));
  }
}

TEST_CASE("brute robust value agrees with robust evaluation") {
  SplitMix64 rng(44);
  OracleOptions o;
  o.starts = 4;
  for (int k = 0; k < 4; ++k) {
    const double p = std::array{1.0, 2.0, 3.0, kInfinity}[k];
    const TabularMDP m = random_mdp(2, 2, 0.9, rng.next());
    for (auto mode : {Rectangularity::SA, Rectangularity::S}) {
      const auto u = UncertaintySpec::uniform(mode, p, 0.1, 0.02, 2, 2);
      const Policy pi = random_policy(rng, 2, 2);
      const ValueFunction brute = brute_robust_value(m, u, pi, 1e-9, o);
      const ValueFunction dual = robust_policy_eval(m, u, pi, 1e-9).V;
      for (std::size_t s = 0; s < 2; ++s) {
        CHECK(std::abs(brute[s] - dual[s]) <= 5e-3);
      }
    }
  }
}

TEST_CASE("exhaustive search") {
  const TabularMDP one = random_mdp(3, 1, 0.9, 2);
  const auto u1 = UncertaintySpec::uniform(Rectangularity::SA, 2.0, 0.1, 0.0,
                                           3, 1);
  const ExhaustiveResult r1 = exhaustive_sa_optimum(one, u1, 1e-8);
  CHECK(r1.policy(0, 0) == 1.0);

  const TabularMDP m = random_mdp(2, 2, 0.9, 6);
  const auto u0 = UncertaintySpec::uniform(Rectangularity::SA, 2.0, 0.0, 0.0,
                                           2, 2);
  const ExhaustiveResult r0 = exhaustive_sa_optimum(m, u0, 1e-10);
  const ClassicalSolution c = classical_value_iteration(m, 1e-10);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(r0.value[s] == doctest::Approx(c.V[s]).epsilon(1e-7));
  }
}

}  // namespace
}  // namespace rmdp
