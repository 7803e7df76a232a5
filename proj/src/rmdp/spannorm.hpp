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

#include <span>

namespace rmdp {

/// Result of sp_q(v) = min_w ||v - w 1||_q.
struct SpanResult {
  double omega = 0.0;  // the minimizing w (q-mean)
  double value = 0.0;  // ||v - omega 1||_q, >= 0
};

/// ||v||_p for p in [1, +inf].
double lp_norm(std::span<const double> v, double p);

/// Minimizer of w -> ||v - w 1||_q. Closed forms for q = 1 (lower median),
/// q = 2 (mean) and q = +inf (midrange); bisection otherwise. q below
/// 1 + 1e-6 is treated as q = 1.
/// Throws EmptyVector, NonFiniteEntry, or InvalidArgument for q < 1.
double q_mean(std::span<const double> v, double q);

/// Bisection on sum_s sign(v_s - w)|v_s - w|^(q-1) = 0 over [min v, max v],
/// for any finite q > 1. Exposed so the closed forms can be cross-checked.
double q_mean_root(std::span<const double> v, double q);

SpanResult span_seminorm(std::span<const double> v, double q);

/// ||v - omega 1||_q for a given omega.
double centered_norm(std::span<const double> v, double omega, double q);

}  // namespace rmdp
