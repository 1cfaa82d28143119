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

// Release engine: sanitize the sufficient statistic m times, and for each
// sanitized value draw t (parameter, dataset) pairs from the model.
//
// Budget: every released dataset is charged epsilon / (m t), so the ledger
// always closes at exactly epsilon. Posterior and data draws read only the
// sanitized statistic and never touch the ledger.
//
// Streams: sanitization k uses Derive(seed, {0, k}); synthesis (k, l) uses
// Derive(seed, {1, k, l}). Results do not depend on evaluation order.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "modips/budget.hpp"
#include "modips/error.hpp"
#include "modips/mechanisms.hpp"
#include "modips/models.hpp"
#include "modips/random.hpp"

namespace modips {

inline constexpr std::uint64_t kSanitizeStream = 0;
inline constexpr std::uint64_t kSynthesisStream = 1;

struct ReleasePlan {
  std::size_t m = 1;
  std::size_t t = 1;
  double epsilon = 1.0;
  MechanismSpec mechanism;
  SanitizationMode mode = Conjoint{};
  std::uint64_t seed = 0;

  void Validate() const {
    detail::Require(m >= 1, ErrorCode::kInvalidPlan, "m must be >= 1");
    detail::Require(t >= 1, ErrorCode::kInvalidPlan, "t must be >= 1");
    detail::Require(std::isfinite(epsilon) && epsilon > 0,
                    ErrorCode::kNonPositiveEpsilon, "plan epsilon must be > 0");
  }

  double PerReleaseEpsilon() const {
    return epsilon / static_cast<double>(m * t);
  }
};

struct SanitizationRecord {
  std::size_t k = 0;
  SufficientStatVector sanitized;
  std::vector<double> scales;
  double epsilon = 0.0;
};

struct SyntheticDataset {
  std::size_t k = 0;
  std::size_t l = 0;
  Dataset data;
};

struct SyntheticRelease {
  ReleasePlan plan;
  // k-major: index k * t + l. Indices are zero-based.
  std::vector<SyntheticDataset> datasets;
  std::vector<SanitizationRecord> sanitizations;
  double per_release_epsilon = 0.0;
  BudgetLedger ledger{1.0};
};

namespace detail {

template <SynthesisModel Model>
SyntheticRelease RunRelease(const Model& model, const Dataset& data,
                            const ReleasePlan& plan) {
  plan.Validate();
  data.Validate();
  const SufficientStatVector stat = model.SufficientStats(data);
  const std::size_t n = data.size();
  const double per_release = plan.PerReleaseEpsilon();

  SyntheticRelease release{plan, {}, {}, per_release, BudgetLedger(plan.epsilon)};
  release.datasets.reserve(plan.m * plan.t);
  release.sanitizations.reserve(plan.m);

  for (std::size_t k = 0; k < plan.m; ++k) {
    RngStream sanitize_rng = RngStream::Derive(plan.seed, {kSanitizeStream, k});
    SanitizedVector sanitized = SanitizeVector(stat, per_release, plan.mode,
                                               plan.mechanism, sanitize_rng);
    for (std::size_t l = 0; l < plan.t; ++l) {
      release.ledger = std::move(release.ledger).Spend(
          "release k=" + std::to_string(k + 1) + " l=" + std::to_string(l + 1),
          per_release);
    }
    for (std::size_t l = 0; l < plan.t; ++l) {
      RngStream rng = RngStream::Derive(plan.seed, {kSynthesisStream, k, l});
      const auto params = model.PosteriorDraw(sanitized.stat, n, rng);
      release.datasets.push_back({k, l, model.DataDraw(params, n, data.bounds, rng)});
    }
    release.sanitizations.push_back(
        {k, std::move(sanitized.stat), std::move(sanitized.scales), per_release});
  }

  const double spent = release.ledger.ComposedTotal();
  if (std::abs(spent - plan.epsilon) > kBudgetSlack * plan.epsilon) {
    throw Error(ErrorCode::kOverBudget,
                "ledger closed at " + FormatDouble(spent) + " instead of " +
                    FormatDouble(plan.epsilon));
  }
  return release;
}

}  // namespace detail

// m sanitizations at epsilon / m, one synthetic dataset each.
template <SynthesisModel Model>
SyntheticRelease ModipsRelease(const Model& model, const Dataset& data,
                               const ReleasePlan& plan) {
  detail::Require(plan.t == 1, ErrorCode::kInvalidPlan,
                  "single-layer release needs t = 1");
  return detail::RunRelease(model, data, plan);
}

// m sanitizations at epsilon / (m t), t syntheses per sanitization. With
// t = 1 the output equals ModipsRelease.
template <SynthesisModel Model>
SyntheticRelease NestedModipsRelease(const Model& model, const Dataset& data,
                                     const ReleasePlan& plan) {
  return detail::RunRelease(model, data, plan);
}

// Per-dataset estimates under the synthesis model, in release order.
template <SynthesisModel Model>
std::vector<Estimate> EstimateRelease(const Model& model,
                                      const SyntheticRelease& release) {
  std::vector<Estimate> out;
  out.reserve(release.datasets.size());
  for (const SyntheticDataset& d : release.datasets) {
    out.push_back(model.EstimateFrom(d.data));
  }
  return out;
}

}  // namespace modips
