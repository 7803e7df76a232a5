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
#include "rmdp/error.hpp"
#include "rmdp/generative.hpp"
#include "rmdp/model.hpp"
#include "rmdp/rng.hpp"

namespace rmdp {
namespace {

TabularMDP two_state(std::vector<double> kernel) {
  MdpData d;
  d.num_states = 2;
  d.num_actions = 1;
  d.kernel = std::move(kernel);
  d.reward = {0.0, 1.0};
  d.discount = 0.9;
  d.initial_dist = {0.5, 0.5};
  return TabularMDP(d);
}

TEST_CASE("point mass always returns its state") {
  const TabularMDP m = two_state({0.0, 1.0, 1.0, 0.0});
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(sample_next(m, 0, 0, rng) == 1);
    REQUIRE(sample_next(m, 1, 0, rng) == 0);
  }
}

TEST_CASE("fair row frequency") {
  const TabularMDP m = two_state({0.5, 0.5, 0.5, 0.5});
  SplitMix64 rng(2024);
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) zeros += sample_next(m, 0, 0, rng) == 0;
  CHECK(zeros >= 49000);
  CHECK(zeros <= 51000);
}

TEST_CASE("same seed, same stream") {
  const TabularMDP m = random_mdp(4, 2, 0.9, 3);
  SplitMix64 a(99), b(99);
  for (int i = 0; i < 500; ++i) {
    REQUIRE(sample_next(m, i % 4, i % 2, a) == sample_next(m, i % 4, i % 2, b));
  }
  CHECK(build_empirical(m, 50, 7).counts == build_empirical(m, 50, 7).counts);
}

TEST_CASE("empirical model") {
  const TabularMDP m = random_mdp(4, 2, 0.9, 3);
  SUBCASE("N = 1 gives point masses") {
    const EmpiricalModel e = build_empirical(m, 1, 5);
    for (double x : e.kernel_hat()) CHECK((x == 0.0 || x == 1.0));
  }
  SUBCASE("deterministic kernel is recovered exactly") {
    const TabularMDP d = two_state({0.0, 1.0, 1.0, 0.0});
    for (std::uint64_t n : {1, 7, 1000}) {
      CHECK(build_empirical(d, n, n).kernel_hat() == d.data().kernel);
    }
  }
  SUBCASE("counts add up") {
    const EmpiricalModel e = build_empirical(m, 37, 5);
    std::uint64_t total = 0;
    for (auto c : e.counts) total += c;
    CHECK(total == 37 * 4 * 2);
  }
  CHECK_THROWS_AS(build_empirical(m, 0, 1), Error);
}

TEST_CASE("L1 error shrinks like one over root N") {
  const TabularMDP m = random_mdp(5, 3, 0.9, 11);
  const auto mean_l1 = [&](std::uint64_t n) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto hat = build_empirical(m, n, seed).kernel_hat();
      for (std::size_t i = 0; i < hat.size(); ++i) {
        total += std::abs(hat[i] - m.data().kernel[i]);
      }
    }
    return total;
  };
  const double ratio = mean_l1(100) / mean_l1(10000);
  CHECK(ratio >= 5.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("empirical rmdp") {
  const TabularMDP m = random_mdp(3, 2, 0.9, 4);
  const auto u = UncertaintySpec::uniform(Rectangularity::SA, 2.0, 0.1, 0.0,
                                          3, 2);
  // Counts proportional to the true kernel: the estimate is within 1/N.
  EmpiricalModel e;
  e.num_states = 3;
  e.num_actions = 2;
  e.samples_per_pair = 1'000'000;
  for (double p : m.data().kernel) {
    e.counts.push_back(static_cast<std::uint64_t>(std::llround(p * 1e6)));
  }
  for (std::size_t r = 0; r < 6; ++r) {
    std::uint64_t sum = 0;
    for (std::size_t k = 0; k < 3; ++k) sum += e.counts[r * 3 + k];
    e.counts[r * 3] += 1'000'000 - sum;
  }
  const TabularMDP hat = empirical_rmdp(m, e, u);
  for (std::size_t i = 0; i < hat.data().kernel.size(); ++i) {
    CHECK(std::abs(hat.data().kernel[i] - m.data().kernel[i]) <= 1e-6 + 1e-15);
  }
  CHECK(hat.data().reward == m.data().reward);
  EmpiricalModel wrong = e;
  wrong.num_states = 2;
  CHECK_THROWS_AS(empirical_rmdp(m, wrong, u), Error);
}

}  // namespace
}  // namespace rmdp
