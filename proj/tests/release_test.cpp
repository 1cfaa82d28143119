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

#include "modips/release.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace modips {
namespace {

using testing::CodeOf;

Dataset SampleData(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  return GaussianDataDraw(0.0, 1.0, n, Bounds::Make(-4, 4), rng);
}

ReleasePlan Plan(std::size_t m, std::size_t t, double eps, std::uint64_t seed) {
  ReleasePlan plan;
  plan.m = m;
  plan.t = t;
  plan.epsilon = eps;
  plan.mechanism.kind = MechanismKind::kTruncatedLaplace;
  plan.seed = seed;
  return plan;
}

TEST(ModipsReleaseTest, FiveReleasesAtUnitBudget) {
  const GaussianKnownVarianceModel model(1.0);
  const Dataset data = SampleData(1000, 1);
  const SyntheticRelease r = ModipsRelease(model, data, Plan(5, 1, 1.0, 7));
  EXPECT_DOUBLE_EQ(r.per_release_epsilon, 0.2);
  ASSERT_EQ(r.datasets.size(), 5u);
  ASSERT_EQ(r.sanitizations.size(), 5u);
  EXPECT_EQ(r.ledger.entries().size(), 5u);
  EXPECT_NEAR(r.ledger.ComposedTotal(), 1.0, 1e-12);
  for (const SanitizationRecord& s : r.sanitizations) {
    // lambda = delta / (eps / m) = 0.008 / 0.2
    EXPECT_NEAR(s.scales[0], 0.04, 1e-15);
    EXPECT_DOUBLE_EQ(s.epsilon, 0.2);
  }
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(r.datasets[k].k, k);
    EXPECT_EQ(r.datasets[k].data.size(), 1000u);
    for (double x : r.datasets[k].data.values) ASSERT_TRUE(data.bounds.Contains(x));
  }
}

TEST(NestedReleaseTest, GridAndLedger) {
  const GaussianKnownVarianceModel model(1.0);
  const SyntheticRelease r =
      NestedModipsRelease(model, SampleData(200, 2), Plan(3, 4, 1.2, 3));
  EXPECT_DOUBLE_EQ(r.per_release_epsilon, 0.1);
  ASSERT_EQ(r.datasets.size(), 12u);
  EXPECT_EQ(r.sanitizations.size(), 3u);
  EXPECT_EQ(r.ledger.entries().size(), 12u);
  EXPECT_NEAR(r.ledger.ComposedTotal(), 1.2, 1.2e-12);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(r.datasets[i].k, i / 4);
    EXPECT_EQ(r.datasets[i].l, i % 4);
  }
}

TEST(NestedReleaseTest, SingleSynthesisMatchesModipsRelease) {
  const GaussianKnownVarianceModel model(1.0);
  const Dataset data = SampleData(100, 9);
  const SyntheticRelease a = ModipsRelease(model, data, Plan(4, 1, 0.5, 11));
  const SyntheticRelease b = NestedModipsRelease(model, data, Plan(4, 1, 0.5, 11));
  ASSERT_EQ(a.datasets.size(), b.datasets.size());
  for (std::size_t i = 0; i < a.datasets.size(); ++i) {
    EXPECT_EQ(a.datasets[i].data.values, b.datasets[i].data.values);
  }
  EXPECT_EQ(a.ledger.ToText(), b.ledger.ToText());
}

TEST(NestedReleaseTest, SyntheticSetsShareTheirSanitization) {
  // With a single record and a tiny sigma, each synthetic set sits at its
  // row's posterior mean, so sets within a row agree far more closely than
  // sets across rows.
  const GaussianKnownVarianceModel model(1e-6);
  const Dataset data = Dataset::Make({0.0}, Bounds::Make(-4, 4));
  const SyntheticRelease r = NestedModipsRelease(model, data, Plan(3, 3, 0.3, 5));
  for (std::size_t k = 0; k < 3; ++k) {
    const double s = r.sanitizations[k].sanitized.values[0];
    for (std::size_t l = 0; l < 3; ++l) {
      EXPECT_NEAR(r.datasets[k * 3 + l].data.values[0], s, 1e-4);
    }
  }
  EXPECT_GT(std::abs(r.sanitizations[0].sanitized.values[0] -
                     r.sanitizations[1].sanitized.values[0]),
            1e-3);
}

TEST(ModipsReleaseTest, RejectsInvalidPlans) {
  const GaussianKnownVarianceModel model(1.0);
  const Dataset data = SampleData(10, 1);
  EXPECT_EQ(CodeOf([&] { ModipsRelease(model, data, Plan(0, 1, 1, 0)); }),
            ErrorCode::kInvalidPlan);
  EXPECT_EQ(CodeOf([&] { ModipsRelease(model, data, Plan(2, 2, 1, 0)); }),
            ErrorCode::kInvalidPlan);
  EXPECT_EQ(CodeOf([&] { NestedModipsRelease(model, data, Plan(2, 0, 1, 0)); }),
            ErrorCode::kInvalidPlan);
  EXPECT_EQ(CodeOf([&] { ModipsRelease(model, data, Plan(2, 1, 0, 0)); }),
            ErrorCode::kNonPositiveEpsilon);
  const Dataset empty{{}, Bounds::Make(-1, 1)};
  EXPECT_EQ(CodeOf([&] { ModipsRelease(model, empty, Plan(1, 1, 1, 0)); }),
            ErrorCode::kEmptyDataset);
}

TEST(ModipsReleaseTest, SameSeedSameRelease) {
  const GaussianKnownVarianceModel model(1.0);
  const Dataset data = SampleData(300, 4);
  const SyntheticRelease a = ModipsRelease(model, data, Plan(6, 1, 1.0, 123));
  const SyntheticRelease b = ModipsRelease(model, data, Plan(6, 1, 1.0, 123));
  const SyntheticRelease c = ModipsRelease(model, data, Plan(6, 1, 1.0, 124));
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.datasets[i].data.values, b.datasets[i].data.values);
  }
  EXPECT_NE(a.datasets[0].data.values, c.datasets[0].data.values);
}

TEST(ModipsReleaseTest, HugeBudgetLeavesStatisticUnchanged) {
  const GaussianKnownVarianceModel model(1.0);
  const Dataset data = SampleData(1000, 6);
  const double mean = SampleMean(data.values);
  const SyntheticRelease r = ModipsRelease(model, data, Plan(5, 1, 1e6, 8));
  for (const SanitizationRecord& s : r.sanitizations) {
    EXPECT_NEAR(s.sanitized.values[0], mean, 1e-5);
  }
}

TEST(ModipsReleaseTest, LedgerEntryPerSyntheticSet) {
  const GaussianKnownVarianceModel model(1.0);
  const Dataset data = SampleData(50, 3);
  for (std::size_t m : {1u, 2u, 7u}) {
    for (std::size_t t : {1u, 3u}) {
      const SyntheticRelease r =
          NestedModipsRelease(model, data, Plan(m, t, 0.9, m * 10 + t));
      EXPECT_EQ(r.ledger.entries().size(), m * t);
      EXPECT_NEAR(r.ledger.ComposedTotal(), 0.9, 0.9e-12);
      EXPECT_LE(r.ledger.ComposedTotal(), 0.9 * (1 + kBudgetSlack));
    }
  }
}

TEST(ModipsReleaseTest, BernoulliWithExponentialMechanism) {
  const BernoulliBetaModel model(1.0, 1.0);
  const Dataset data = Dataset::Make({1, 1, 0, 1, 0, 0, 1, 1}, Bounds::Make(0, 1));
  ReleasePlan plan = Plan(3, 1, 3.0, 17);
  plan.mechanism.kind = MechanismKind::kExponentialDiscrete;
  plan.mechanism.candidates = BernoulliBetaModel::CountCandidates(data.size());
  const SyntheticRelease r = ModipsRelease(model, data, plan);
  for (const SanitizationRecord& s : r.sanitizations) {
    const double v = s.sanitized.values[0];
    EXPECT_EQ(v, std::round(v));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 8.0);
  }
  const std::vector<Estimate> est = EstimateRelease(model, r);
  ASSERT_EQ(est.size(), 3u);
  for (const Estimate& e : est) {
    EXPECT_GE(e.value, 0.0);
    EXPECT_LE(e.value, 1.0);
  }
}

}  // namespace
}  // namespace modips
