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

#include <stdexcept>
#include <string>
#include <string_view>

namespace modips {

enum class ErrorCode {
  kOverBudget,
  kNonPositiveEpsilon,
  kWeightSumInvalid,
  kNegativeWeight,
  kInvalidSampleSize,
  kNonPositiveSensitivity,
  kStatOutOfBounds,
  kInvalidBounds,
  kEmptyCandidates,
  kNonPositiveScoreSensitivity,
  kEmptyDataset,
  kValueOutOfBounds,
  kDomainTooLarge,
  kInvalidPlan,
  kTooFewReleases,
  kLengthMismatch,
  kUnbalancedGrid,
  kInvalidProbability,
  kInvalidKernel,
  kUnsupportedMechanism,
  kInvalidConfig,
  kIo,
};

constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOverBudget: return "OverBudget";
    case ErrorCode::kNonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::kWeightSumInvalid: return "WeightSumInvalid";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kInvalidSampleSize: return "InvalidSampleSize";
    case ErrorCode::kNonPositiveSensitivity: return "NonPositiveSensitivity";
    case ErrorCode::kStatOutOfBounds: return "StatOutOfBounds";
    case ErrorCode::kInvalidBounds: return "InvalidBounds";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kNonPositiveScoreSensitivity:
      return "NonPositiveScoreSensitivity";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kValueOutOfBounds: return "ValueOutOfBounds";
    case ErrorCode::kDomainTooLarge: return "DomainTooLarge";
    case ErrorCode::kInvalidPlan: return "InvalidPlan";
    case ErrorCode::kTooFewReleases: return "TooFewReleases";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnbalancedGrid: return "UnbalancedGrid";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kInvalidKernel: return "InvalidKernel";
    case ErrorCode::kUnsupportedMechanism: return "UnsupportedMechanism";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// All library failures are reported through this type; `code()` identifies
// the failed precondition.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void Require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace detail
}  // namespace modips
