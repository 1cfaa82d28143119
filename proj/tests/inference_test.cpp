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

#include "modips/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "test_util.hpp"

namespace modips {
namespace {

using testing::CodeOf;

// Published two-sided 95% critical values.
constexpr double kT32 = 2.036933343;
constexpr double kT10 = 2.228138852;
constexpr double kZ975 = 1.959963985;

TEST(CombineTest, ThreeReleaseExample) {
  const std::vector<double> est{1, 2, 3};
  const std::vector<double> within{1, 1, 1};
  const CombinedInference c = Combine(est, within, 0.95);
  EXPECT_EQ(c.theta_bar, 2.0);
  EXPECT_EQ(c.varpi, 1.0);
  ASSERT_TRUE(c.b.has_value());
  EXPECT_EQ(*c.b, 1.0);
  EXPECT_NEAR(c.u, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.nu, 32.0, 1e-12);
  const double half = kT32 * std::sqrt(4.0 / 3.0);
  EXPECT_NEAR(c.ci_upper - c.theta_bar, half, 1e-6);
  EXPECT_NEAR(c.theta_bar - c.ci_lower, half, 1e-6);
  EXPECT_EQ(c.method, "combined");
}

TEST(CombineTest, IdenticalEstimatesUseNormalQuantile) {
  const std::vector<double> est{0.5, 0.5, 0.5, 0.5};
  const std::vector<double> within{0.04, 0.04, 0.04, 0.04};
  const CombinedInference c = Combine(est, within, 0.95);
  EXPECT_EQ(*c.b, 0.0);
  EXPECT_TRUE(std::isinf(c.nu));
  EXPECT_DOUBLE_EQ(c.u, 0.04);
  EXPECT_NEAR(c.ci_upper, 0.5 + kZ975 * 0.2, 1e-8);
}

TEST(CombineTest, Errors) {
  const std::vector<double> one{1.0};
  EXPECT_EQ(CodeOf([&] { Combine(one, one, 0.95); }), ErrorCode::kTooFewReleases);
  const std::vector<double> two{1.0, 2.0};
  const std::vector<double> three{1.0, 1.0, 1.0};
  EXPECT_EQ(CodeOf([&] { Combine(two, three, 0.95); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([&] { Combine(two, two, 1.0); }), ErrorCode::kInvalidProbability);
  const std::vector<double> negative{1.0, -1.0};
  EXPECT_EQ(CodeOf([&] { Combine(two, negative, 0.9); }), ErrorCode::kInvalidConfig);
}

TEST(CombineTest, ReleaseCountDivisor) {
  const std::vector<double> est{1, 2, 3};
  const std::vector<double> within{1, 1, 1};
  const CombinedInference c =
      Combine(est, within, 0.95, BetweenDivisor::kReleaseCount);
  EXPECT_NEAR(*c.b, 2.0 / 3.0, 1e-15);
}

TEST(CombineTest, PermutationInvariantAndVarianceBounds) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> draw(0.0, 1.0);
  std::uniform_real_distribution<double> var(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + trial % 9;
    std::vector<double> est(m);
    std::vector<double> within(m);
    for (std::size_t i = 0; i < m; ++i) {
      est[i] = draw(gen);
      within[i] = var(gen);
    }
    const CombinedInference a = Combine(est, within, 0.9);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<double> est2;
    std::vector<double> within2;
    for (std::size_t i : order) {
      est2.push_back(est[i]);
      within2.push_back(within[i]);
    }
    const CombinedInference b = Combine(est2, within2, 0.9);
    EXPECT_NEAR(a.theta_bar, b.theta_bar, 1e-12);
    EXPECT_NEAR(a.u, b.u, 1e-12);
    EXPECT_NEAR(a.nu, b.nu, 1e-9 * a.nu);
    EXPECT_NEAR(a.ci_lower, b.ci_lower, 1e-10);
    EXPECT_GE(a.u, a.varpi);
  }
}

TEST(CombineTest, DegreesOfFreedomGrowAsBetweenVarianceShrinks) {
  const std::vector<double> within{1, 1, 1};
  double previous = 0.0;
  for (double spread : {1.0, 0.5, 0.1, 0.01, 0.001}) {
    const std::vector<double> est{-spread, 0.0, spread};
    const CombinedInference c = Combine(est, within, 0.95);
    EXPECT_GT(c.nu, previous);
    previous = c.nu;
    EXPECT_GE(c.u, c.varpi);
  }
  EXPECT_GT(previous, 1e10);
}

TEST(TQuantileTest, KnownValues) {
  EXPECT_NEAR(TQuantile(kInfiniteDf, 0.975), kZ975, 1e-8);
  EXPECT_NEAR(TQuantile(1.0, 0.75), std::tan(std::numbers::pi / 4), 1e-12);
  EXPECT_NEAR(TQuantile(10.0, 0.975), kT10, 1e-8);
  EXPECT_NEAR(TQuantile(32.0, 0.975), kT32, 1e-8);
  EXPECT_NEAR(TQuantile(10.0, 0.025), -kT10, 1e-8);
}

TEST(TQuantileTest, AgreesWithQuadratureInversion) {
  for (double nu : {2.0, 5.5, 32.0, 200.0}) {
    for (double p : {0.8, 0.95, 0.995}) {
      EXPECT_NEAR(TQuantile(nu, p), testing::StudentTQuantileByQuadrature(nu, p),
                  1e-8)
          << nu << " " << p;
    }
  }
}

TEST(TQuantileTest, RejectsBadProbability) {
  EXPECT_EQ(CodeOf([] { TQuantile(5, 0.0); }), ErrorCode::kInvalidProbability);
  EXPECT_EQ(CodeOf([] { TQuantile(5, 1.0); }), ErrorCode::kInvalidProbability);
}

TEST(SingleReleaseTest, NormalInterval) {
  const CombinedInference c = SingleReleaseInference(0.0, 1.0, 0.95);
  EXPECT_NEAR(c.ci_lower, -1.96, 5e-5);
  EXPECT_NEAR(c.ci_upper, 1.96, 5e-5);
  EXPECT_FALSE(c.b.has_value());
  EXPECT_EQ(c.method, "uncorrected");
}

TEST(NestedDecompositionTest, IdenticalGridIsZero) {
  const std::vector<std::vector<double>> grid(4, std::vector<double>(3, 1.5));
  const NestedDecomposition d = DecomposeNested(grid);
  EXPECT_EQ(d.b1, 0.0);
  EXPECT_EQ(d.b2, 0.0);
  EXPECT_EQ(d.theta_bar, 1.5);
  EXPECT_FALSE(d.varpi.has_value());
}

TEST(NestedDecompositionTest, NegativeMomentEstimateClipped) {
  // Row means are equal while rows vary internally.
  const std::vector<std::vector<double>> grid{{0, 2}, {2, 0}, {1, 1}};
  const NestedDecomposition d = DecomposeNested(grid);
  EXPECT_EQ(d.b1, 0.0);
  EXPECT_NEAR(d.b2, 4.0 / 3.0, 1e-15);
}

TEST(NestedDecompositionTest, RecoversKnownComponents) {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> between(0.0, 2.0);
  std::normal_distribution<double> within(0.0, 1.0);
  const int grids = 100;
  double b1 = 0.0;
  double b2 = 0.0;
  double single_b2 = 0.0;
  for (int g = 0; g < grids; ++g) {
    std::vector<std::vector<double>> grid(50, std::vector<double>(10));
    for (auto& row : grid) {
      const double a = between(gen);
      for (double& x : row) x = a + within(gen);
    }
    const NestedDecomposition d = DecomposeNested(grid);
    if (g == 0) single_b2 = d.b2;
    b1 += d.b1 / grids;
    b2 += d.b2 / grids;
  }
  // One grid pins b2 tightly; b1 rests on only 50 row means, so it is
  // checked through the average over grids.
  EXPECT_NEAR(single_b2, 1.0, 0.2);
  EXPECT_NEAR(b1, 4.0, 0.4);
  EXPECT_NEAR(b2, 1.0, 0.05);
}

TEST(NestedDecompositionTest, Errors) {
  EXPECT_EQ(CodeOf([] { DecomposeNested({{1, 2}}); }), ErrorCode::kTooFewReleases);
  EXPECT_EQ(CodeOf([] { DecomposeNested({{1}, {2}}); }), ErrorCode::kTooFewReleases);
  EXPECT_EQ(CodeOf([] { DecomposeNested({{1, 2}, {1, 2, 3}}); }),
            ErrorCode::kUnbalancedGrid);
}

TEST(NestedDecompositionTest, AveragesWithinVariances) {
  const NestedDecomposition d =
      DecomposeNested({{1, 2}, {3, 4}}, {{0.1, 0.2}, {0.3, 0.4}});
  ASSERT_TRUE(d.varpi.has_value());
  EXPECT_NEAR(*d.varpi, 0.25, 1e-15);
}

}  // namespace
}  // namespace modips
