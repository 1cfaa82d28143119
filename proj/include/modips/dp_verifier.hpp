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

// Exact privacy audits of finite channels.
//
// A mechanism with finitely many inputs and outputs is a row-stochastic
// kernel P(o | x). Pure epsilon-DP over an output set Q follows from the
// pointwise bound |log P(o|x) - log P(o|x')| <= epsilon for every single
// output o: summing P(o|x) <= e^eps P(o|x') over o in Q gives the set form.
// So the audit only inspects singletons, which is exact, not a relaxation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "modips/error.hpp"
#include "modips/mechanisms.hpp"
#include "modips/models.hpp"

namespace modips {

inline constexpr double kRowSumTolerance = 1e-10;
// Slack on epsilon bounds absorbing floating-point error in the kernel.
inline constexpr double kDpTolerance = 1e-9;

class DiscreteChannel {
 public:
  DiscreteChannel(std::size_t inputs, std::size_t outputs,
                  std::vector<double> kernel)
      : inputs_(inputs), outputs_(outputs), kernel_(std::move(kernel)) {
    Validate();
  }

  static DiscreteChannel FromRows(const std::vector<std::vector<double>>& rows) {
    detail::Require(!rows.empty() && !rows.front().empty(),
                    ErrorCode::kInvalidKernel, "empty kernel");
    std::vector<double> flat;
    for (const auto& row : rows) {
      detail::Require(row.size() == rows.front().size(),
                      ErrorCode::kInvalidKernel, "ragged kernel rows");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return DiscreteChannel(rows.size(), rows.front().size(), std::move(flat));
  }

  std::size_t inputs() const { return inputs_; }
  std::size_t outputs() const { return outputs_; }
  const std::vector<double>& kernel() const { return kernel_; }

  double operator()(std::size_t input, std::size_t output) const {
    return kernel_[input * outputs_ + output];
  }

 private:
  void Validate() const {
    detail::Require(inputs_ >= 1 && outputs_ >= 1 &&
                        kernel_.size() == inputs_ * outputs_,
                    ErrorCode::kInvalidKernel, "kernel shape mismatch");
    for (std::size_t x = 0; x < inputs_; ++x) {
      double sum = 0.0;
      for (std::size_t o = 0; o < outputs_; ++o) {
        const double p = (*this)(x, o);
        detail::Require(std::isfinite(p) && p >= 0.0, ErrorCode::kInvalidKernel,
                        "negative or non-finite probability in row " +
                            std::to_string(x));
        sum += p;
      }
      detail::Require(std::abs(sum - 1.0) <= kRowSumTolerance,
                      ErrorCode::kInvalidKernel,
                      "row " + std::to_string(x) + " sums to " +
                          detail::FormatDouble(sum));
    }
  }

  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<double> kernel_;
};

using NeighborPairs = std::vector<std::pair<std::size_t, std::size_t>>;

// (x, x + 1) for x in [0, count - 1): neighbors for count-valued inputs,
// where changing one record moves the count by at most one.
inline NeighborPairs AdjacentPairs(std::size_t count) {
  NeighborPairs pairs;
  for (std::size_t x = 0; x + 1 < count; ++x) pairs.emplace_back(x, x + 1);
  return pairs;
}

struct DpAudit {
  double max_log_ratio = 0.0;
  std::size_t input_a = 0;
  std::size_t input_b = 0;
  std::size_t output = 0;
  // Set when some output has zero probability under one neighbor only.
  bool violation = false;

  bool Satisfies(double epsilon) const {
    return !violation && max_log_ratio <= epsilon + kDpTolerance;
  }
};

inline DpAudit MaxLogRatio(const DiscreteChannel& channel,
                           const NeighborPairs& neighbors) {
  DpAudit audit;
  if (!neighbors.empty()) {
    audit.input_a = neighbors.front().first;
    audit.input_b = neighbors.front().second;
  }
  for (const auto& [a, b] : neighbors) {
    detail::Require(a < channel.inputs() && b < channel.inputs(),
                    ErrorCode::kInvalidKernel, "neighbor pair out of range");
    for (std::size_t o = 0; o < channel.outputs(); ++o) {
      const double pa = channel(a, o);
      const double pb = channel(b, o);
      if (pa == 0.0 && pb == 0.0) continue;
      double ratio;
      if (pa == 0.0 || pb == 0.0) {
        ratio = std::numeric_limits<double>::infinity();
      } else {
        ratio = std::abs(std::log(pa) - std::log(pb));
      }
      if (ratio > audit.max_log_ratio) {
        audit.max_log_ratio = ratio;
        audit.input_a = a;
        audit.input_b = b;
        audit.output = o;
      }
    }
  }
  audit.violation = std::isinf(audit.max_log_ratio);
  return audit;
}

// Channel of the discrete exponential mechanism: row x holds the selection
// probabilities for scores[x].
inline DiscreteChannel ExponentialChannel(
    const std::vector<std::vector<double>>& scores, double delta_u,
    double epsilon) {
  std::vector<std::vector<double>> rows;
  rows.reserve(scores.size());
  for (const auto& s : scores) {
    rows.push_back(ExponentialProbabilities(s, delta_u, epsilon));
  }
  return DiscreteChannel::FromRows(rows);
}

// Applies a row-stochastic map from the channel's outputs to new outputs.
inline DiscreteChannel PostProcess(const DiscreteChannel& channel,
                                   const DiscreteChannel& map) {
  detail::Require(map.inputs() == channel.outputs(), ErrorCode::kInvalidKernel,
                  "post-processing map does not match channel outputs");
  std::vector<double> kernel(channel.inputs() * map.outputs(), 0.0);
  for (std::size_t x = 0; x < channel.inputs(); ++x) {
    for (std::size_t o = 0; o < channel.outputs(); ++o) {
      const double p = channel(x, o);
      if (p == 0.0) continue;
      for (std::size_t z = 0; z < map.outputs(); ++z) {
        kernel[x * map.outputs() + z] += p * map(o, z);
      }
    }
  }
  return DiscreteChannel(channel.inputs(), map.outputs(), std::move(kernel));
}

// Independent runs of two channels on the same input; output (o1, o2) is
// flattened to o1 * second.outputs() + o2.
inline DiscreteChannel SequentialCompose(const DiscreteChannel& first,
                                         const DiscreteChannel& second) {
  detail::Require(first.inputs() == second.inputs(), ErrorCode::kInvalidKernel,
                  "composed channels need the same inputs");
  const std::size_t outputs = first.outputs() * second.outputs();
  std::vector<double> kernel(first.inputs() * outputs);
  for (std::size_t x = 0; x < first.inputs(); ++x) {
    for (std::size_t a = 0; a < first.outputs(); ++a) {
      for (std::size_t b = 0; b < second.outputs(); ++b) {
        kernel[x * outputs + a * second.outputs() + b] = first(x, a) * second(x, b);
      }
    }
  }
  return DiscreteChannel(first.inputs(), outputs, std::move(kernel));
}

// Largest total-variation distance between corresponding rows.
inline double MaxRowTotalVariation(const DiscreteChannel& a,
                                   const DiscreteChannel& b) {
  detail::Require(a.inputs() == b.inputs() && a.outputs() == b.outputs(),
                  ErrorCode::kInvalidKernel, "channel shapes differ");
  double worst = 0.0;
  for (std::size_t x = 0; x < a.inputs(); ++x) {
    double tv = 0.0;
    for (std::size_t o = 0; o < a.outputs(); ++o) tv += std::abs(a(x, o) - b(x, o));
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

inline constexpr std::size_t kMaxPipelineN = 8;

// End-to-end channel from original count to synthetic count for the
// Bernoulli-Beta pipeline. Only the discrete exponential sanitizer has a
// finite output space.
inline DiscreteChannel PipelineChannel(const BernoulliBetaModel& model,
                                       std::size_t n, double epsilon,
                                       MechanismKind mechanism) {
  detail::Require(mechanism == MechanismKind::kExponentialDiscrete,
                  ErrorCode::kUnsupportedMechanism,
                  std::string(MechanismName(mechanism)) +
                      " has continuous output; only exponential-discrete can "
                      "be enumerated");
  detail::Require(n <= kMaxPipelineN, ErrorCode::kDomainTooLarge,
                  "n = " + std::to_string(n) + " exceeds " +
                      std::to_string(kMaxPipelineN));
  return DiscreteChannel(
      n + 1, n + 1,
      BernoulliPipelineDistribution(n, model.alpha(), model.beta(), epsilon));
}

}  // namespace modips
