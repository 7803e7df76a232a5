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
#include <sstream>
#include <string>

#include "doctest.h"
#include "rmdp/error.hpp"
#include "rmdp/experiment.hpp"
#include "rmdp/model.hpp"

namespace rmdp {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.sample_counts = {10, 100};
  c.num_seeds = 3;
  c.record_wall_time = false;
  return c;
}

TEST_CASE("csv is deterministic") {
  const TabularMDP m = random_mdp(3, 2, 0.9, 2);
  const auto u = UncertaintySpec::uniform(Rectangularity::SA, 1.0, 0.05, 0.0,
                                          3, 2);
  std::ostringstream a, b;
  run_sample_complexity(m, u, small_config(), &a);
  run_sample_complexity(m, u, small_config(), &b);
  CHECK(a.str() == b.str());
  std::istringstream lines(a.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "mode,p,beta,gamma,N,seed,eps_hat,iterations,wall_ms");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    CHECK(line.rfind("sa,1.0,0.05,0.9,", 0) == 0);
  }
  CHECK(rows == 6);
}

TEST_CASE("records are in (N, seed) order and not below the optimum") {
  const TabularMDP m = random_mdp(3, 2, 0.9, 2);
  for (auto mode : {Rectangularity::SA, Rectangularity::S}) {
    const auto u = UncertaintySpec::uniform(mode, 2.0, 0.1, 0.0, 3, 2);
    const ExperimentSummary s = run_sample_complexity(m, u, small_config());
    REQUIRE(s.records.size() == 6);
    CHECK(s.records[0].N == 10);
    CHECK(s.records[2].seed == 3);
    CHECK(s.records[3].N == 100);
    for (const auto& r : s.records) {
      CHECK(r.eps_hat >= -2.0 * r.eps_opt_bound);
      CHECK(r.q_error >= 0.0);
    }
    CHECK(s.median_eps.size() == 2);
  }
}

TEST_CASE("deterministic kernel: no estimation error") {
  MdpData d;
  d.num_states = 3;
  d.num_actions = 2;
  d.kernel = {0, 1, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 1, 0};
  d.reward = {0.1, 0.5, 0.9, 0.2, 0.4, 0.3};
  d.discount = 0.9;
  d.initial_dist = {1.0, 0.0, 0.0};
  const TabularMDP m(d);
  for (auto mode : {Rectangularity::SA, Rectangularity::S}) {
    const auto u = UncertaintySpec::uniform(mode, 2.0, 0.1, 0.0, 3, 2);
    const ExperimentSummary s = run_sample_complexity(m, u, small_config());
    for (const auto& r : s.records) {
      CHECK(std::abs(r.eps_hat) <= 2.0 * r.eps_opt_bound + 1e-8);
    }
  }
}

TEST_CASE("line fit and median") {
  const LineFit f = fit_line({0, 1, 2}, {1, -1, -3});
  CHECK(f.slope == doctest::Approx(-2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(std::isnan(fit_line({1}, {1}).slope));
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("config checks") {
  ExperimentConfig c = small_config();
  c.sample_counts = {100, 10};
  CHECK_THROWS_AS(check_config(c), Error);
  c = small_config();
  c.num_seeds = 0;
  CHECK_THROWS_AS(check_config(c), Error);
  CHECK(cell_seed(1, 100) != cell_seed(1, 316));
  CHECK(cell_seed(1, 100) != cell_seed(2, 100));
}

}  // namespace
}  // namespace rmdp
