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
#include <limits>
#include <vector>

#include "doctest.h"
#include "rmdp/error.hpp"
#include "rmdp/model.hpp"

namespace rmdp {
namespace {

MdpData one_state(double reward, double gamma) {
  MdpData d;
  d.num_states = 1;
  d.num_actions = 1;
  d.kernel = {1.0};
  d.reward = {reward};
  d.discount = gamma;
  d.initial_dist = {1.0};
  return d;
}

TEST_CASE("identity kernel on one state is valid") {
  CHECK(validate_mdp(one_state(0.5, 0.9)).ok());
  CHECK_NOTHROW(TabularMDP(one_state(0.5, 0.9)));
}

TEST_CASE("row that does not sum to one") {
  MdpData d;
  d.num_states = 2;
  d.num_actions = 1;
  d.kernel = {0.5, 0.6, 0.5, 0.5};
  d.reward = {0.0, 0.0};
  d.discount = 0.9;
  d.initial_dist = {0.5, 0.5};
  const ValidationReport r = validate_mdp(d);
  REQUIRE(r.issues.size() == 1);
  CHECK(r.issues[0].code == ErrorCode::NonStochasticRow);
  CHECK(r.issues[0].residual == doctest::Approx(0.1));
  CHECK(r.issues[0].state == 0);
}

TEST_CASE("discount of one is rejected") {
  const ValidationReport r = validate_mdp(one_state(0.0, 1.0));
  REQUIRE_FALSE(r.ok());
  CHECK(r.issues[0].code == ErrorCode::BadDiscount);
  try {
    TabularMDP m(one_state(0.0, 1.0));
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadDiscount);
  }
}

TEST_CASE("negative and non-finite entries") {
  MdpData d = one_state(0.0, 0.5);
  d.num_states = 2;
  d.kernel = {1.5, -0.5, 0.0, 1.0};
  d.reward = {0.0, 0.0};
  d.initial_dist = {1.0, 0.0};
  CHECK_FALSE(validate_mdp(d).ok());
  d.kernel = {1.0, 0.0, 0.0, 1.0};
  d.reward = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  CHECK_FALSE(validate_mdp(d).ok());
}

TEST_CASE("random_mdp") {
  SUBCASE("single state is a point mass") {
    const TabularMDP m = random_mdp(1, 1, 0.9, 7);
    REQUIRE(m.row(0, 0).size() == 1);
    CHECK(m.row(0, 0)[0] == 1.0);
  }
  SUBCASE("same seed, same bits") {
    const TabularMDP a = random_mdp(5, 3, 0.9, 1);
    const TabularMDP b = random_mdp(5, 3, 0.9, 1);
    CHECK(a.data().kernel == b.data().kernel);
    CHECK(a.data().reward == b.data().reward);
    CHECK(a.data().kernel != random_mdp(5, 3, 0.9, 2).data().kernel);
  }
  SUBCASE("always valid") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const std::size_t S = 1 + seed % 9, A = 1 + seed % 4;
      REQUIRE(validate_mdp(random_mdp(S, A, 0.9, seed)).ok());
    }
  }
  CHECK_THROWS_AS(random_mdp(0, 1, 0.9, 1), Error);
  CHECK_THROWS_AS(random_mdp(2, 2, 1.0, 1), Error);
}

TEST_CASE("uncertainty set shapes") {
  const auto sa = UncertaintySpec::uniform(Rectangularity::SA, 2.0, 0.1, 0.0,
                                           3, 2);
  CHECK(sa.betas().size() == 6);
  CHECK(sa.q() == doctest::Approx(2.0));
  const auto s = UncertaintySpec::uniform(Rectangularity::S, 1.0, 0.1, 0.2,
                                          3, 2);
  CHECK(s.betas().size() == 3);
  CHECK(std::isinf(s.q()));
  CHECK(s.alpha(2) == 0.2);
  CHECK_THROWS_AS(UncertaintySpec::uniform(Rectangularity::S, 2.0, -0.1, 0.0,
                                           3, 2),
                  Error);
  CHECK_THROWS_AS(s.check_shape(random_mdp(4, 2, 0.9, 1)), Error);
  CHECK(conjugate_exponent(kInfinity) == 1.0);
  CHECK(conjugate_exponent(3.0) == doctest::Approx(1.5));
}

TEST_CASE("policy rows must be on the simplex") {
  CHECK_THROWS_AS(Policy(1, 2, {0.7, 0.7}), Error);
  CHECK_THROWS_AS(Policy(1, 2, {1.2, -0.2}), Error);
  const std::vector<std::size_t> actions{1, 0};
  const Policy pi = Policy::deterministic(2, actions);
  CHECK(pi(0, 1) == 1.0);
  CHECK(pi.is_deterministic());
  CHECK_FALSE(Policy::uniform(2, 2).is_deterministic());
}

}  // namespace
}  // namespace rmdp
