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

// Releases five synthetic copies of a Gaussian sample at epsilon = 1 and
// prints the combined interval for the mean.

#include <iostream>
#include <vector>

#include "modips/modips.hpp"

int main() {
  const modips::Bounds bounds = modips::Bounds::Make(-4.0, 4.0);
  modips::RngStream rng(7);
  const modips::Dataset original =
      modips::GaussianDataDraw(0.0, 1.0, 1000, bounds, rng);

  modips::ReleasePlan plan;
  plan.m = 5;
  plan.epsilon = 1.0;
  plan.mechanism.kind = modips::MechanismKind::kTruncatedLaplace;
  plan.seed = 42;

  const modips::GaussianKnownVarianceModel model(1.0);
  const modips::SyntheticRelease release =
      modips::ModipsRelease(model, original, plan);

  std::vector<double> estimates;
  std::vector<double> within;
  for (const modips::Estimate& e : modips::EstimateRelease(model, release)) {
    estimates.push_back(e.value);
    within.push_back(e.within_variance);
  }
  const modips::CombinedInference ci = modips::Combine(estimates, within, 0.95);

  std::cout << "original mean " << modips::SampleMean(original.values) << "\n"
            << "combined mean " << ci.theta_bar << "  95% CI [" << ci.ci_lower
            << ", " << ci.ci_upper << "]  nu " << ci.nu << "\n"
            << release.ledger.ToText();
  return 0;
}
