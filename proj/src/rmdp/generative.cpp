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

#include "rmdp/generative.hpp"

#include "rmdp/error.hpp"
#include "rmdp/parallel.hpp"

namespace rmdp {

std::size_t sample_next(const TabularMDP& m, std::size_t s, std::size_t a,
                        SplitMix64& rng) {
  if (s >= m.num_states() || a >= m.num_actions()) {
    throw Error(ErrorCode::InvalidArgument, "state or action out of range");
  }
  const auto row = m.row(s, a);
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t t = 0; t < row.size(); ++t) {
    if (row[t] <= 0.0) continue;
    cum += row[t];
    last = t;
    if (u < cum) return t;
  }
  // Rounding left the CDF just below 1.
  return last;
}

std::uint64_t pair_stream_seed(std::uint64_t seed, std::size_t s,
                               std::size_t a, std::size_t num_actions) {
  return substream_seed(seed, s * num_actions + a);
}

EmpiricalModel build_empirical(const TabularMDP& m, std::uint64_t N,
                               std::uint64_t seed) {
  if (N == 0) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  const std::size_t S = m.num_states(), A = m.num_actions();
  EmpiricalModel emp;
  emp.num_states = S;
  emp.num_actions = A;
  emp.samples_per_pair = N;
  emp.counts.assign(S * A * S, 0);
  parallel_for(S * A, [&](std::size_t pair) {
    const std::size_t s = pair / A, a = pair % A;
    SplitMix64 rng(pair_stream_seed(seed, s, a, A));
    std::uint64_t* counts = emp.counts.data() + pair * S;
    for (std::uint64_t k = 0; k < N; ++k) ++counts[sample_next(m, s, a, rng)];
  });
  return emp;
}

TabularMDP empirical_rmdp(const TabularMDP& m, const EmpiricalModel& emp,
                          const UncertaintySpec& u) {
  const std::size_t S = m.num_states(), A = m.num_actions();
  if (emp.num_states != S || emp.num_actions != A ||
      emp.counts.size() != S * A * S) {
    throw Error(ErrorCode::ShapeMismatch,
                "empirical counts do not fit the model");
  }
  u.check_shape(m);
  return m.with_kernel(emp.kernel_hat());
}

}  // namespace rmdp
