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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modips/error.hpp"

namespace modips {

// Relative slack on all budget comparisons. Budgets such as epsilon / m are
// not exactly representable, so exact comparison would reject legal plans.
inline constexpr double kBudgetSlack = 1e-12;

namespace detail {

inline std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

// Neumaier summation; keeps m * (epsilon / m) within a few ulps of epsilon
// for large m.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace detail

struct BudgetEntry {
  std::string label;
  double epsilon = 0.0;
  // Entries sharing a group id touch disjoint subsets of the data and
  // compose in parallel.
  std::optional<std::string> group;

  bool operator==(const BudgetEntry&) const = default;
};

// Append-only privacy accounting. Entries without a group compose
// sequentially (their epsilons add); grouped entries form one parallel
// block whose cost is the largest per-group total. The composed cost never
// exceeds the total budget.
//
// The ledger is a value: Spend() returns an updated copy.
class BudgetLedger {
 public:
  explicit BudgetLedger(double total_epsilon) : total_(total_epsilon) {
    detail::Require(std::isfinite(total_epsilon) && total_epsilon > 0,
                    ErrorCode::kNonPositiveEpsilon,
                    "total epsilon must be positive and finite");
  }

  [[nodiscard]] BudgetLedger Spend(std::string label, double epsilon,
                                   std::optional<std::string> group = {}) const& {
    BudgetLedger next = *this;
    return std::move(next).Spend(std::move(label), epsilon, std::move(group));
  }

  [[nodiscard]] BudgetLedger Spend(std::string label, double epsilon,
                                   std::optional<std::string> group = {}) && {
    detail::Require(std::isfinite(epsilon) && epsilon > 0,
                    ErrorCode::kNonPositiveEpsilon,
                    "spend of " + detail::FormatDouble(epsilon) + " for '" +
                        label + "'");
    entries_.push_back({std::move(label), epsilon, std::move(group)});
    const double composed = ComposedTotal();
    if (composed > total_ * (1.0 + kBudgetSlack)) {
      throw Error(ErrorCode::kOverBudget,
                  "composed cost " + detail::FormatDouble(composed) +
                      " exceeds total " + detail::FormatDouble(total_));
    }
    return std::move(*this);
  }

  double total_epsilon() const { return total_; }
  const std::vector<BudgetEntry>& entries() const { return entries_; }

  double ComposedTotal() const {
    detail::CompensatedSum sequential;
    std::map<std::string, detail::CompensatedSum> per_group;
    for (const BudgetEntry& e : entries_) {
      if (e.group) {
        per_group[*e.group].Add(e.epsilon);
      } else {
        sequential.Add(e.epsilon);
      }
    }
    double parallel = 0.0;
    for (const auto& [name, spent] : per_group) {
      parallel = std::max(parallel, spent.value());
    }
    return sequential.value() + parallel;
  }

  double Remaining() const { return std::max(0.0, total_ - ComposedTotal()); }

  // One line per entry: label,epsilon,group ("-" when ungrouped). The first
  // line records the total.
  std::string ToText() const {
    std::string out = "total," + detail::FormatDouble(total_) + ",-\n";
    for (const BudgetEntry& e : entries_) {
      out += e.label + "," + detail::FormatDouble(e.epsilon) + "," +
             e.group.value_or("-") + "\n";
    }
    return out;
  }

  bool operator==(const BudgetLedger&) const = default;

 private:
  double total_;
  std::vector<BudgetEntry> entries_;
};

// Per-element budgets w_i * epsilon for individual sanitization.
inline std::vector<double> AllocateWeights(double epsilon,
                                           std::span<const double> weights) {
  detail::Require(std::isfinite(epsilon) && epsilon > 0,
                  ErrorCode::kNonPositiveEpsilon, "epsilon must be positive");
  detail::Require(!weights.empty(), ErrorCode::kWeightSumInvalid,
                  "no weights given");
  double sum = 0.0;
  for (double w : weights) {
    detail::Require(w >= 0.0, ErrorCode::kNegativeWeight,
                    "weight " + detail::FormatDouble(w));
    sum += w;
  }
  detail::Require(std::abs(sum - 1.0) <= 1e-9, ErrorCode::kWeightSumInvalid,
                  "weights sum to " + detail::FormatDouble(sum));
  std::vector<double> out;
  out.reserve(weights.size());
  // Renormalize so the shares add to epsilon up to rounding even when the
  // weights are off by the accepted 1e-9.
  for (double w : weights) out.push_back(w / sum * epsilon);
  return out;
}

}  // namespace modips
