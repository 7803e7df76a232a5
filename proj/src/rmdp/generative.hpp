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
#include <cstdint>

#include "rmdp/model.hpp"
#include "rmdp/rng.hpp"

namespace rmdp {

/// One draw s' ~ P0(.|s,a) by inverse CDF on rng.uniform().
/// Throws InvalidArgument for out-of-range indices.
std::size_t sample_next(const TabularMDP& m, std::size_t s, std::size_t a,
                        SplitMix64& rng);

/// Seed of the stream that serves pair (s,a) under `seed`.
std::uint64_t pair_stream_seed(std::uint64_t seed, std::size_t s,
                               std::size_t a, std::size_t num_actions);

/// N generative calls per (s,a). Each pair draws from its own stream, so the
/// result does not depend on enumeration order or worker count.
/// Throws InvalidArgument for N = 0.
EmpiricalModel build_empirical(const TabularMDP& m, std::uint64_t N,
                               std::uint64_t seed);

/// m with its kernel replaced by emp.kernel_hat(). The uncertainty set is
/// only checked for shape. Throws ShapeMismatch.
TabularMDP empirical_rmdp(const TabularMDP& m, const EmpiricalModel& emp,
                          const UncertaintySpec& u);

}  // namespace rmdp
