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
#include <string>

#include "doctest.h"
#include "rmdp/bellman.hpp"
#include "rmdp/error.hpp"
#include "rmdp/model_io.hpp"

namespace rmdp {
namespace {

constexpr const char* kToy = R"({
  "num_states": 2,
  "num_actions": 1,
  "discount": 0.5,
  "kernel": [[[0.0, 1.0]], [[1.0, 0.0]]],
  "reward": [[1.0], [0.0]],
  "uncertainty": {"mode": "s", "p": "inf", "beta": 0.1}
})";

TEST_CASE("parse a toy model") {
  const ModelFile f = parse_model(kToy);
  CHECK(f.mdp.num_states() == 2);
  CHECK(f.mdp.initial_dist()[0] == 0.5);
  REQUIRE(f.uncertainty.has_value());
  CHECK(f.uncertainty->mode() == Rectangularity::S);
  CHECK(std::isinf(f.uncertainty->p()));
  CHECK(f.uncertainty->alpha(1) == 0.0);
}

TEST_CASE("bad row reports its line") {
  const std::string text = R"({
  "num_states": 2,
  "num_actions": 1,
  "discount": 0.5,
  "kernel": [[[0.0, 1.0]],
             [[0.7, 0.7]]],
  "reward": [[1.0], [0.0]]
})";
  try {
    parse_model(text, "toy.json");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonStochasticRow);
    CHECK(std::string(e.what()).rfind("toy.json:6:", 0) == 0);
  }
}

TEST_CASE("syntax and schema errors") {
  const auto code_of = [](const std::string& text) {
    try {
      parse_model(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of("{\"num_states\": 2,") == ErrorCode::ParseError);
  CHECK(code_of("{\"num_states\": 1}") == ErrorCode::ParseError);
  std::string negative = kToy;
  negative.replace(negative.find("\"beta\": 0.1"), 11, "\"beta\": -1");
  CHECK(code_of(negative) == ErrorCode::NegativeBeta);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), Error);
}

TEST_CASE("round trip") {
  const TabularMDP m = random_mdp(3, 2, 0.9, 5);
  const auto u = UncertaintySpec::uniform(Rectangularity::SA, 1.5, 0.2, 0.1,
                                          3, 2);
  const ModelFile f = parse_model(model_to_json(m, &u));
  CHECK(f.mdp.data().kernel == m.data().kernel);
  CHECK(f.mdp.data().reward == m.data().reward);
  CHECK(f.mdp.discount() == m.discount());
  REQUIRE(f.uncertainty.has_value());
  CHECK(f.uncertainty->betas() == u.betas());
  CHECK(f.uncertainty->p() == 1.5);
}

TEST_CASE("exponents") {
  CHECK(std::isinf(parse_exponent("inf")));
  CHECK(parse_exponent("1.5") == 1.5);
  CHECK_THROWS_AS(parse_exponent("0.5"), Error);
  CHECK_THROWS_AS(parse_exponent("abc"), Error);
  CHECK(format_exponent(kInfinity) == "inf");
  const TextPosition pos = position_of("ab\ncd", 4);
  CHECK(pos.line == 2);
  CHECK(pos.column == 2);
}

TEST_CASE("solution json holds the fields") {
  const ModelFile f = parse_model(kToy);
  const SolveResult r = drvi(f.mdp, *f.uncertainty, 1e-8);
  const std::string json = solution_to_json(r, *f.uncertainty);
  for (const char* key : {"\"V\"", "\"Q\"", "\"policy\"", "\"iterations\"",
                          "\"residual\"", "\"eps_opt_bound\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
}

}  // namespace
}  // namespace rmdp
