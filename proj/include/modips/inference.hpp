// Copyright 2026 The modips Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Inference from multiple synthetic releases.
//
// Given per-release estimates theta_k with within-set variances v_k:
//   theta_bar = mean(theta_k)        varpi = mean(v_k)
//   b = sum (theta_k - theta_bar)^2 / (m - 1)
//   u = varpi + b / m                nu = (m - 1) (1 + m varpi / b)^2
// and intervals come from t_nu(theta_bar, u). When b == 0 the reference
// distribution degenerates to the normal (nu = infinity).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "modips/error.hpp"
#include "modips/models.hpp"
#include "modips/random.hpp"

namespace modips {

inline constexpr double kInfiniteDf = std::numeric_limits<double>::infinity();

// Inverse CDF of Student's t with `nu` degrees of freedom; nu = infinity
// gives the standard normal quantile.
inline double TQuantile(double nu, double p) {
  detail::Require(p > 0.0 && p < 1.0, ErrorCode::kInvalidProbability,
                  "p = " + detail::FormatDouble(p));
  detail::Require(nu > 0.0, ErrorCode::kInvalidConfig,
                  "degrees of freedom must be positive");
  if (std::isinf(nu)) return NormalQuantile(p);
  return boost::math::quantile(boost::math::students_t_distribution<double>(nu),
                               p);
}

// Between-set variance divisor. kSampleVariance (m - 1) is the default;
// kReleaseCount (m) is kept for sensitivity checks.
enum class BetweenDivisor { kSampleVariance, kReleaseCount };

struct CombinedInference {
  double theta_bar = 0.0;
  double varpi = 0.0;
  // Absent for single-release inference.
  std::optional<double> b;
  double u = 0.0;
  double nu = kInfiniteDf;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double level = 0.95;
  std::string method;

  bool Covers(double truth) const { return ci_lower <= truth && truth <= ci_upper; }
};

inline CombinedInference Combine(
    std::span<const double> estimates, std::span<const double> within_variances,
    double level, BetweenDivisor divisor = BetweenDivisor::kSampleVariance) {
  detail::Require(estimates.size() >= 2, ErrorCode::kTooFewReleases,
                  "combining needs at least two releases");
  detail::Require(estimates.size() == within_variances.size(),
                  ErrorCode::kLengthMismatch,
                  "estimates and within variances differ in length");
  detail::Require(level > 0.0 && level < 1.0, ErrorCode::kInvalidProbability,
                  "level = " + detail::FormatDouble(level));
  for (double v : within_variances) {
    detail::Require(v >= 0.0, ErrorCode::kInvalidConfig,
                    "within variance must be nonnegative");
  }

  const double m = static_cast<double>(estimates.size());
  CombinedInference out;
  out.level = level;
  out.method = "combined";
  out.theta_bar = SampleMean(estimates);
  out.varpi = SampleMean(within_variances);

  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  double b = 0.0;
  if (*lo != *hi) {
    double ss = 0.0;
    for (double e : estimates) ss += (e - out.theta_bar) * (e - out.theta_bar);
    b = ss / (divisor == BetweenDivisor::kSampleVariance ? m - 1.0 : m);
  }
  out.b = b;
  out.u = out.varpi + b / m;
  if (b > 0.0) {
    const double r = 1.0 + m * out.varpi / b;
    out.nu = (m - 1.0) * r * r;
  } else {
    out.nu = kInfiniteDf;
  }
  const double half = TQuantile(out.nu, 0.5 * (1.0 + level)) * std::sqrt(out.u);
  out.ci_lower = out.theta_bar - half;
  out.ci_upper = out.theta_bar + half;
  return out;
}

// Normal interval from one release using only its within-set variance. This
// ignores sanitization and synthesis noise, hence "uncorrected".
inline CombinedInference SingleReleaseInference(double estimate,
                                                double within_variance,
                                                double level) {
  detail::Require(within_variance >= 0.0, ErrorCode::kInvalidConfig,
                  "within variance must be nonnegative");
  detail::Require(level > 0.0 && level < 1.0, ErrorCode::kInvalidProbability,
                  "level = " + detail::FormatDouble(level));
  CombinedInference out;
  out.theta_bar = estimate;
  out.varpi = within_variance;
  out.u = within_variance;
  out.level = level;
  out.method = "uncorrected";
  const double half = NormalQuantile(0.5 * (1.0 + level)) * std::sqrt(within_variance);
  out.ci_lower = estimate - half;
  out.ci_upper = estimate + half;
  return out;
}

struct NestedDecomposition {
  double b1 = 0.0;  // sanitization component
  double b2 = 0.0;  // synthesis component
  double theta_bar = 0.0;
  std::optional<double> varpi;
};

// One-way random-effects moment estimates on an m x t grid of estimates
// (row k = sanitization, column l = synthesis). The within-row variance
// estimates b2; the variance of row means estimates b1 + b2 / t.
inline NestedDecomposition DecomposeNested(
    const std::vector<std::vector<double>>& estimates,
    const std::vector<std::vector<double>>& within_variances = {}) {
  detail::Require(estimates.size() >= 2, ErrorCode::kTooFewReleases,
                  "need at least two sanitizations");
  const std::size_t t = estimates.front().size();
  detail::Require(t >= 2, ErrorCode::kTooFewReleases,
                  "need at least two syntheses per sanitization");
  for (const auto& row : estimates) {
    detail::Require(row.size() == t, ErrorCode::kUnbalancedGrid,
                    "rows of the estimate grid differ in length");
  }

  NestedDecomposition out;
  std::vector<double> row_means;
  row_means.reserve(estimates.size());
  double within = 0.0;
  for (const auto& row : estimates) {
    row_means.push_back(SampleMean(row));
    within += SampleVariance(row);
  }
  out.b2 = within / static_cast<double>(estimates.size());
  out.b1 = std::max(0.0, SampleVariance(row_means) - out.b2 / static_cast<double>(t));
  out.theta_bar = SampleMean(row_means);

  if (!within_variances.empty()) {
    detail::Require(within_variances.size() == estimates.size(),
                    ErrorCode::kUnbalancedGrid,
                    "within-variance grid shape differs");
    double sum = 0.0;
    for (const auto& row : within_variances) {
      detail::Require(row.size() == t, ErrorCode::kUnbalancedGrid,
                      "within-variance grid shape differs");
      for (double v : row) sum += v;
    }
    out.varpi = sum / static_cast<double>(estimates.size() * t);
  }
  return out;
}

}  // namespace modips
