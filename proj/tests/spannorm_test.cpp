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
#include "rmdp/model.hpp"
#include "rmdp/rng.hpp"
#include "rmdp/spannorm.hpp"
#include "rmdp/verify.hpp"

namespace rmdp {
namespace {

TEST_CASE("q-mean closed forms") {
  const std::vector<double> c{3.0, 3.0, 3.0};
  for (double q : {1.0, 1.5, 2.0, 3.0, kInfinity}) CHECK(q_mean(c, q) == 3.0);
  CHECK(q_mean(std::vector<double>{0, 1, 5}, 1.0) == 1.0);
  CHECK(q_mean(std::vector<double>{0, 1}, kInfinity) == 0.5);
  CHECK(q_mean(std::vector<double>{1, -1}, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("q-mean for q = 3 against a dense grid") {
  const std::vector<double> v{0, 1, 5};
  double best_w = 0.0, best = kInfinity;
  for (int i = 0; i <= 5'000'000; ++i) {
    const double w = i * 1e-6;
    const double f = centered_norm(v, w, 3.0);
    if (f < best) {
      best = f;
      best_w = w;
    }
  }
  CHECK(std::abs(q_mean(v, 3.0) - best_w) <= 1e-5);
}

TEST_CASE("span seminorm examples") {
  CHECK(span_seminorm(std::vector<double>{0, 1}, kInfinity).value ==
        doctest::Approx(0.5));
  CHECK(span_seminorm(std::vector<double>{0, 1, 5}, 1.0).value ==
        doctest::Approx(5.0));
  CHECK(span_seminorm(std::vector<double>{1, -1}, 2.0).value ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(span_seminorm(std::vector<double>{4, 4}, 1.5).value == 0.0);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(q_mean(std::vector<double>{}, 2.0), Error);
  CHECK_THROWS_AS(q_mean(std::vector<double>{1.0, NAN}, 2.0), Error);
  CHECK_THROWS_AS(q_mean(std::vector<double>{1.0}, 0.5), Error);
}

TEST_CASE("properties on random vectors") {
  SplitMix64 rng(31);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + rng.next() % 8;
    const auto v = random_vector(rng, n, -5.0, 5.0);
    const double c = 10.0 * rng.uniform() - 5.0;
    const double lambda = 4.0 * rng.uniform() - 2.0;
    for (double q : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
      const double sp = span_seminorm(v, q).value;
      std::vector<double> shifted = v, scaled = v;
      for (double& x : shifted) x += c;
      for (double& x : scaled) x *= lambda;
      CHECK(std::abs(span_seminorm(shifted, q).value - sp) <=
            1e-10 * (1 + sp));
      CHECK(std::abs(span_seminorm(scaled, q).value - std::abs(lambda) * sp) <=
            1e-10 * (1 + sp));
      CHECK(sp <= 2.0 * lp_norm(v, q) + 1e-12);
      const double factor = std::isinf(q) ? 1.0 : std::pow(double(n), 1.0 / q);
      CHECK(sp <= 2.0 * factor * lp_norm(v, kInfinity) + 1e-12);
      CHECK(sp <= centered_norm(v, 0.37, q) + 1e-12);
    }
    CHECK(std::abs(q_mean_root(v, 2.0) - q_mean(v, 2.0)) <= 1e-4);
  }
}

}  // namespace
}  // namespace rmdp
