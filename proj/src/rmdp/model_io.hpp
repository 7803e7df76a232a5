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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "rmdp/bellman.hpp"
#include "rmdp/model.hpp"

namespace rmdp {

/// Contents of a model file. `uncertainty` is absent when the file has no
/// "uncertainty" object.
struct ModelFile {
  TabularMDP mdp;
  std::optional<UncertaintySpec> uncertainty;
};

/// Parses a model document. Errors carry "<source>:<line>:<col>: " in front
/// of the message: ParseError for malformed JSON, missing fields or wrong
/// types; the validation codes of validate_mdp (NonStochasticRow,
/// RewardOutOfRange, BadDiscount, DimensionMismatch) pointing at the
/// offending entry; NegativeBeta / InvalidArgument / ShapeMismatch for the
/// uncertainty object.
ModelFile parse_model(std::string_view text,
                      std::string_view source = "<input>");

/// Reads and parses a file. Throws IoError if it cannot be read.
ModelFile load_model(const std::string& path);

/// Model document accepted by parse_model(); `u` may be null.
std::string model_to_json(const TabularMDP& m, const UncertaintySpec* u);

std::string solution_to_json(const SolveResult& r, const UncertaintySpec& u);

/// Parses "inf", "infinity" or a number >= 1. Throws InvalidArgument.
double parse_exponent(std::string_view text);

/// "inf" for +infinity, shortest round-trip decimal otherwise.
std::string format_exponent(double p);

/// 1-based line and column of a byte offset.
struct TextPosition {
  std::size_t line = 1;
  std::size_t column = 1;
};
TextPosition position_of(std::string_view text, std::size_t offset);

}  // namespace rmdp
