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

#include "rmdp/spannorm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rmdp/error.hpp"

namespace rmdp {
namespace {

constexpr int kMaxBisectionSteps = 200;
constexpr double kUnitQThreshold = 1.0 + 1e-6;

void check_input(std::span<const double> v, double q) {
  if (v.empty()) throw Error(ErrorCode::EmptyVector, "empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::NonFiniteEntry, "vector has a non-finite entry");
    }
  }
  if (!(q >= 1.0)) throw Error(ErrorCode::InvalidArgument, "q must be >= 1");
}

double lower_median(std::span<const double> v) {
  std::vector<double> tmp(v.begin(), v.end());
  const std::size_t k = (tmp.size() - 1) / 2;
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(k),
                   tmp.end());
  return tmp[k];
}

}  // namespace

double lp_norm(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  if (p == 2.0) {
    for (double x : v) s += (x / scale) * (x / scale);
    return scale * std::sqrt(s);
  }
  for (double x : v) s += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

double q_mean_root(std::span<const double> v, double q) {
  check_input(v, q);
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it, hi = *hi_it;
  const double range = hi - lo;
  if (range == 0.0) return lo;
  const double tol = 1e-10 * (range + 1.0);
  const double e = q - 1.0;
  // g is non-increasing in w; evaluated on deviations scaled by the range so
  // large q cannot overflow.
  auto g = [&](double w) {
    double sum = 0.0;
    for (double x : v) {
      const double d = (x - w) / range;
      sum += d >= 0.0 ? std::pow(d, e) : -std::pow(-d, e);
    }
    return sum;
  };
  for (int i = 0; i < kMaxBisectionSteps && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double q_mean(std::span<const double> v, double q) {
  check_input(v, q);
  if (std::isinf(q)) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return 0.5 * (*lo + *hi);
  }
  if (q < kUnitQThreshold) return lower_median(v);
  if (q == 2.0) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }
  return q_mean_root(v, q);
}

double centered_norm(std::span<const double> v, double omega, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x - omega));
    return m;
  }
  if (q < kUnitQThreshold) {
    double s = 0.0;
    for (double x : v) s += std::abs(x - omega);
    return s;
  }
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x - omega));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  if (q == 2.0) {
    for (double x : v) {
      const double d = (x - omega) / scale;
      s += d * d;
    }
    return scale * std::sqrt(s);
  }
  for (double x : v) s += std::pow(std::abs(x - omega) / scale, q);
  return scale * std::pow(s, 1.0 / q);
}

SpanResult span_seminorm(std::span<const double> v, double q) {
  const double omega = q_mean(v, q);
  return {omega, centered_norm(v, omega, q)};
}

}  // namespace rmdp
