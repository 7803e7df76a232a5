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

#include <string>

#include "doctest.h"
#include "rmdp/error.hpp"
#include "rmdp/verify.hpp"

namespace rmdp {
namespace {

VerifyConfig tiny() {
  VerifyConfig c;
  c.max_states = 3;
  c.count = 20;
  c.oracle.starts = 4;
  return c;
}

TEST_CASE("config guards") {
  VerifyConfig c = tiny();
  c.max_states = 7;
  try {
    check_verify_config(c);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooManyStates);
  }
  c = tiny();
  c.betas = {0.1, -1.0};
  try {
    check_verify_config(c);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeBeta);
  }
}

TEST_CASE("small suites pass and report") {
  const auto results = verify_all(tiny());
  CHECK(results.size() == 11);
  for (const CheckResult& r : results) {
    CAPTURE(r.name);
    CHECK(r.passed);
    CHECK(r.cases > 0);
  }
  const std::string report = format_report(results);
  CHECK(report.find("dual-oracle kappa_sa") != std::string::npos);
  CHECK(report.find("FAIL") == std::string::npos);
}

TEST_CASE("random helpers") {
  SplitMix64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto d = random_distribution(rng, 4, k % 2 == 0);
    double sum = 0.0;
    for (double x : d) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0));
  }
  const Policy pi = random_policy(rng, 3, 2);
  CHECK(pi.num_states() == 3);
}

}  // namespace
}  // namespace rmdp
