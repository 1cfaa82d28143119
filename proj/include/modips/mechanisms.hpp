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

// Epsilon-DP sanitizers for bounded statistics.
//
// Laplace-family sanitizers are driven by a single uniform per draw through
// the Laplace quantile function, so a draw is a deterministic function of
// the stream state. The truncated variant inverts the Laplace CDF restricted
// to the bounds; the boundary-inflated variant clamps an unrestricted draw,
// putting the tail masses on the bounds as point masses.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modips/budget.hpp"
#include "modips/error.hpp"
#include "modips/random.hpp"

namespace modips {

struct Bounds {
  double lower = 0.0;
  double upper = 1.0;

  static Bounds Make(double lower, double upper) {
    detail::Require(std::isfinite(lower) && std::isfinite(upper) &&
                        lower < upper,
                    ErrorCode::kInvalidBounds,
                    "need finite lower < upper, got [" +
                        detail::FormatDouble(lower) + ", " +
                        detail::FormatDouble(upper) + "]");
    return Bounds{lower, upper};
  }

  double width() const { return upper - lower; }
  double midpoint() const { return lower + 0.5 * (upper - lower); }
  bool Contains(double x) const { return x >= lower && x <= upper; }
  double Clamp(double x) const { return std::clamp(x, lower, upper); }

  bool operator==(const Bounds&) const = default;
};

// Statistic vector s with per-element l1 global sensitivities.
struct SufficientStatVector {
  std::vector<double> values;
  std::vector<double> sensitivities;
  std::optional<std::vector<Bounds>> bounds;

  std::size_t size() const { return values.size(); }

  void Validate() const {
    detail::Require(!values.empty(), ErrorCode::kLengthMismatch,
                    "statistic vector is empty");
    detail::Require(values.size() == sensitivities.size(),
                    ErrorCode::kLengthMismatch,
                    "values and sensitivities differ in length");
    for (double d : sensitivities) {
      detail::Require(std::isfinite(d) && d > 0,
                      ErrorCode::kNonPositiveSensitivity,
                      "sensitivity " + detail::FormatDouble(d));
    }
    if (bounds) {
      detail::Require(bounds->size() == values.size(),
                      ErrorCode::kLengthMismatch,
                      "bounds and values differ in length");
      for (std::size_t i = 0; i < values.size(); ++i) {
        detail::Require((*bounds)[i].Contains(values[i]),
                        ErrorCode::kStatOutOfBounds,
                        "element " + std::to_string(i));
      }
    }
  }

  // delta_s = sum of element sensitivities.
  double TotalSensitivity() const {
    double sum = 0.0;
    for (double d : sensitivities) sum += d;
    return sum;
  }

  double MeanSensitivity() const {
    return TotalSensitivity() / static_cast<double>(sensitivities.size());
  }

  bool operator==(const SufficientStatVector&) const = default;
};

enum class MechanismKind {
  kLaplace,
  kTruncatedLaplace,
  kBitLaplace,
  kExponentialDiscrete,
};

constexpr std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kLaplace: return "laplace";
    case MechanismKind::kTruncatedLaplace: return "truncated-laplace";
    case MechanismKind::kBitLaplace: return "bit-laplace";
    case MechanismKind::kExponentialDiscrete: return "exponential-discrete";
  }
  return "unknown";
}

inline MechanismKind ParseMechanism(std::string_view name) {
  for (MechanismKind kind :
       {MechanismKind::kLaplace, MechanismKind::kTruncatedLaplace,
        MechanismKind::kBitLaplace, MechanismKind::kExponentialDiscrete}) {
    if (MechanismName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown mechanism '" + std::string(name) + "'");
}

// Mechanism choice plus its parameters. Bounds for the truncated and BIT
// variants come from the statistic vector unless given here. The discrete
// exponential mechanism selects among `candidates` with utility
// -|candidate - s_i| (score sensitivity delta_i).
struct MechanismSpec {
  MechanismKind kind = MechanismKind::kTruncatedLaplace;
  std::optional<Bounds> bounds;
  std::vector<double> candidates;

  bool operator==(const MechanismSpec&) const = default;
};

// l1 global sensitivity of the mean of n records bounded in [c0, c1].
inline double GsBoundedMean(const Bounds& bounds, std::size_t n) {
  detail::Require(n >= 1, ErrorCode::kInvalidSampleSize, "n must be >= 1");
  return bounds.width() / static_cast<double>(n);
}

namespace detail {

inline void RequireEpsilon(double epsilon) {
  Require(std::isfinite(epsilon) && epsilon > 0, ErrorCode::kNonPositiveEpsilon,
          "epsilon " + FormatDouble(epsilon));
}

inline void RequireSensitivity(double sensitivity) {
  Require(std::isfinite(sensitivity) && sensitivity > 0,
          ErrorCode::kNonPositiveSensitivity,
          "sensitivity " + FormatDouble(sensitivity));
}

// Laplace quantile written in terms of t = p - 1/2, which keeps the centre
// exact: t == 0 maps to `center` bit for bit.
inline double LaplaceQuantileCentered(double center, double scale, double t) {
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(t));
  return t < 0 ? center - magnitude : center + magnitude;
}

}  // namespace detail

// Noise scale delta / epsilon of the Laplace mechanism.
inline double LaplaceScale(double sensitivity, double epsilon) {
  detail::RequireSensitivity(sensitivity);
  detail::RequireEpsilon(epsilon);
  return sensitivity / epsilon;
}

// Quantile of Laplace(center, scale) renormalized on `bounds`, evaluated at
// u in (0, 1). Exposed so the sampler can be checked against fixed inputs.
inline double TruncatedLaplaceQuantile(double center, double scale,
                                       const Bounds& bounds, double u) {
  // Tail masses below / above the bounds are 1/2 + lo/2 and 1/2 + hi/2;
  // expm1 keeps the retained mass accurate when the scale dwarfs the width.
  const double lo = std::expm1(-(center - bounds.lower) / scale);
  const double hi = std::expm1(-(bounds.upper - center) / scale);
  const double kept = -0.5 * (lo + hi);
  // p - 1/2 for p = lower_mass + u * kept.
  const double t = (u - 0.5) * kept + 0.25 * (lo - hi);
  return bounds.Clamp(detail::LaplaceQuantileCentered(center, scale, t));
}

inline double LaplaceSanitize(double value, double sensitivity, double epsilon,
                              RngStream& rng) {
  const double scale = LaplaceScale(sensitivity, epsilon);
  return detail::LaplaceQuantileCentered(value, scale, UniformOpen(rng) - 0.5);
}

inline double TruncatedLaplaceSanitize(double value, double sensitivity,
                                       double epsilon, const Bounds& bounds,
                                       RngStream& rng) {
  const double scale = LaplaceScale(sensitivity, epsilon);
  detail::Require(bounds.Contains(value), ErrorCode::kStatOutOfBounds,
                  "statistic " + detail::FormatDouble(value) +
                      " outside its bounds");
  return TruncatedLaplaceQuantile(value, scale, bounds, UniformOpen(rng));
}

// Boundary-inflated truncated Laplace: clamp an unrestricted draw. Uses the
// same uniform as LaplaceSanitize, so with inactive bounds both agree.
inline double BitLaplaceSanitize(double value, double sensitivity,
                                 double epsilon, const Bounds& bounds,
                                 RngStream& rng) {
  detail::Require(bounds.Contains(value), ErrorCode::kStatOutOfBounds,
                  "statistic " + detail::FormatDouble(value) +
                      " outside its bounds");
  return bounds.Clamp(LaplaceSanitize(value, sensitivity, epsilon, rng));
}

// Selection probabilities exp(score * eps / (2 delta_u)), normalized. The
// maximum score is subtracted before exponentiation.
inline std::vector<double> ExponentialProbabilities(
    std::span<const double> scores, double delta_u, double epsilon) {
  detail::Require(!scores.empty(), ErrorCode::kEmptyCandidates,
                  "no candidates");
  detail::Require(std::isfinite(delta_u) && delta_u > 0,
                  ErrorCode::kNonPositiveScoreSensitivity,
                  "delta_u " + detail::FormatDouble(delta_u));
  detail::RequireEpsilon(epsilon);
  const double top = *std::max_element(scores.begin(), scores.end());
  const double factor = epsilon / (2.0 * delta_u);
  std::vector<double> probs(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp((scores[i] - top) * factor);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

// Index of the selected candidate; one uniform, inverted through the
// cumulative probabilities.
inline std::size_t ExponentialMechanismIndex(std::span<const double> scores,
                                             double delta_u, double epsilon,
                                             RngStream& rng) {
  const std::vector<double> probs =
      ExponentialProbabilities(scores, delta_u, epsilon);
  const double u = UniformOpen(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  // Rounding left u above the final partial sum; take the last candidate
  // with nonzero probability.
  std::size_t last = probs.size() - 1;
  while (last > 0 && probs[last] == 0.0) --last;
  return last;
}

template <typename Candidate>
const Candidate& ExponentialMechanismDiscrete(
    std::span<const Candidate> candidates, std::span<const double> scores,
    double delta_u, double epsilon, RngStream& rng) {
  detail::Require(!candidates.empty(), ErrorCode::kEmptyCandidates,
                  "no candidates");
  detail::Require(candidates.size() == scores.size(),
                  ErrorCode::kLengthMismatch,
                  "candidates and scores differ in length");
  return candidates[ExponentialMechanismIndex(scores, delta_u, epsilon, rng)];
}

// Score-function form: `score(candidate)` is evaluated once per candidate.
template <typename Candidate, typename ScoreFn>
  requires std::invocable<ScoreFn&, const Candidate&>
const Candidate& ExponentialMechanismDiscrete(
    std::span<const Candidate> candidates, ScoreFn&& score, double delta_u,
    double epsilon, RngStream& rng) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const Candidate& c : candidates) scores.push_back(score(c));
  return ExponentialMechanismDiscrete(candidates, std::span<const double>(scores),
                                      delta_u, epsilon, rng);
}

// Utility -|candidate - value| used when the exponential mechanism sanitizes
// a numeric statistic.
inline std::vector<double> DistanceScores(std::span<const double> candidates,
                                          double value) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (double c : candidates) scores.push_back(-std::abs(c - value));
  return scores;
}

// Sanitizes one element with the given mechanism at the given sensitivity
// and budget. Returns the Laplace scale (or delta_u / epsilon for the
// exponential mechanism) through `scale_out`.
inline double SanitizeElement(double value, double sensitivity, double epsilon,
                              const MechanismSpec& spec,
                              const std::optional<Bounds>& bounds,
                              RngStream& rng, double* scale_out = nullptr) {
  const double scale = LaplaceScale(sensitivity, epsilon);
  if (scale_out) *scale_out = scale;
  const std::optional<Bounds>& b = spec.bounds ? spec.bounds : bounds;
  switch (spec.kind) {
    case MechanismKind::kLaplace:
      return LaplaceSanitize(value, sensitivity, epsilon, rng);
    case MechanismKind::kTruncatedLaplace:
      detail::Require(b.has_value(), ErrorCode::kInvalidBounds,
                      "truncated Laplace needs bounds");
      return TruncatedLaplaceSanitize(value, sensitivity, epsilon, *b, rng);
    case MechanismKind::kBitLaplace:
      detail::Require(b.has_value(), ErrorCode::kInvalidBounds,
                      "BIT Laplace needs bounds");
      return BitLaplaceSanitize(value, sensitivity, epsilon, *b, rng);
    case MechanismKind::kExponentialDiscrete: {
      const std::span<const double> candidates(spec.candidates);
      const std::vector<double> scores = DistanceScores(candidates, value);
      return ExponentialMechanismDiscrete(candidates,
                                          std::span<const double>(scores),
                                          sensitivity, epsilon, rng);
    }
  }
  throw Error(ErrorCode::kUnsupportedMechanism, "unknown mechanism kind");
}

// Conjoint: every element uses the common sensitivity delta_s = sum delta_i
// and the whole budget. Individual: element i uses its own delta_i and the
// budget share w_i * epsilon.
struct Conjoint {};
struct Individual {
  std::vector<double> weights;
};
using SanitizationMode = std::variant<Conjoint, Individual>;

struct SanitizedVector {
  SufficientStatVector stat;
  std::vector<double> scales;
  std::vector<double> epsilons;
};

// Per-element (sensitivity, epsilon) pairs implied by a mode; exposed for
// auditing without drawing noise.
inline std::vector<std::pair<double, double>> ElementBudgets(
    const SufficientStatVector& stat, double epsilon,
    const SanitizationMode& mode) {
  detail::RequireEpsilon(epsilon);
  std::vector<std::pair<double, double>> out;
  out.reserve(stat.size());
  if (std::holds_alternative<Conjoint>(mode)) {
    const double total = stat.TotalSensitivity();
    for (std::size_t i = 0; i < stat.size(); ++i) out.emplace_back(total, epsilon);
  } else {
    const auto& weights = std::get<Individual>(mode).weights;
    detail::Require(weights.size() == stat.size(), ErrorCode::kLengthMismatch,
                    "weights and statistics differ in length");
    const std::vector<double> shares = AllocateWeights(epsilon, weights);
    for (std::size_t i = 0; i < stat.size(); ++i) {
      out.emplace_back(stat.sensitivities[i], shares[i]);
    }
  }
  return out;
}

inline std::vector<double> SanitizationScales(const SufficientStatVector& stat,
                                              double epsilon,
                                              const SanitizationMode& mode) {
  std::vector<double> scales;
  for (const auto& [sensitivity, eps] : ElementBudgets(stat, epsilon, mode)) {
    scales.push_back(LaplaceScale(sensitivity, eps));
  }
  return scales;
}

inline SanitizedVector SanitizeVector(const SufficientStatVector& stat,
                                      double epsilon,
                                      const SanitizationMode& mode,
                                      const MechanismSpec& spec,
                                      RngStream& rng) {
  stat.Validate();
  const auto budgets = ElementBudgets(stat, epsilon, mode);
  SanitizedVector out;
  out.stat = stat;
  out.scales.resize(stat.size());
  for (std::size_t i = 0; i < stat.size(); ++i) {
    std::optional<Bounds> element_bounds;
    if (stat.bounds) element_bounds = (*stat.bounds)[i];
    out.stat.values[i] =
        SanitizeElement(stat.values[i], budgets[i].first, budgets[i].second,
                        spec, element_bounds, rng, &out.scales[i]);
    out.epsilons.push_back(budgets[i].second);
  }
  return out;
}

}  // namespace modips
