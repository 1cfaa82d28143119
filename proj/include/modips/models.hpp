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

// Bayesian synthesis models.
//
// A model supplies the Bayesian sufficient statistic of a dataset (with its
// global sensitivity), a posterior draw given a sanitized statistic, and a
// data draw given parameters. The release engine only touches data through
// SufficientStats(); everything after sanitization is post-processing.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "modips/error.hpp"
#include "modips/mechanisms.hpp"
#include "modips/random.hpp"

namespace modips {

// One attribute, n records, all within `bounds`.
struct Dataset {
  std::vector<double> values;
  Bounds bounds;

  static Dataset Make(std::vector<double> values, Bounds bounds) {
    Dataset d{std::move(values), bounds};
    d.Validate();
    return d;
  }

  std::size_t size() const { return values.size(); }

  void Validate() const {
    detail::Require(!values.empty(), ErrorCode::kEmptyDataset,
                    "dataset has no records");
    for (std::size_t i = 0; i < values.size(); ++i) {
      detail::Require(bounds.Contains(values[i]), ErrorCode::kValueOutOfBounds,
                      "record " + std::to_string(i) + " = " +
                          detail::FormatDouble(values[i]));
    }
  }

  bool operator==(const Dataset&) const = default;
};

// Point estimate of the model parameter from one (synthetic) dataset and
// its posterior variance under the same model.
struct Estimate {
  double value = 0.0;
  double within_variance = 0.0;
};

inline double SampleMean(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

// Unbiased (n - 1 divisor) sample variance; exactly zero for constant
// input or a single record.
inline double SampleVariance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
    return 0.0;
  }
  const double mean = SampleMean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

template <typename M>
concept SynthesisModel = requires(const M& model, const Dataset& data,
                                  const SufficientStatVector& stat,
                                  const typename M::Parameters& params,
                                  std::size_t n, RngStream& rng) {
  typename M::Parameters;
  { model.SufficientStats(data) } -> std::same_as<SufficientStatVector>;
  { model.PosteriorDraw(stat, n, rng) } -> std::same_as<typename M::Parameters>;
  { model.DataDraw(params, n, data.bounds, rng) } -> std::same_as<Dataset>;
  { model.EstimateFrom(data) } -> std::same_as<Estimate>;
};

// ---------------------------------------------------------------------------
// Gaussian with known sigma, flat prior on the mean.

inline SufficientStatVector GaussianSufficientStats(const Dataset& data) {
  data.Validate();
  return SufficientStatVector{{SampleMean(data.values)},
                              {GsBoundedMean(data.bounds, data.size())},
                              std::vector<Bounds>{data.bounds}};
}

// mu* ~ N(s*, sigma^2 / n).
inline double GaussianPosteriorDraw(double sanitized_mean, std::size_t n,
                                    double sigma, RngStream& rng) {
  detail::Require(n >= 1, ErrorCode::kInvalidSampleSize, "n must be >= 1");
  detail::Require(sigma > 0, ErrorCode::kInvalidConfig, "sigma must be > 0");
  return Normal(rng, sanitized_mean, sigma / std::sqrt(static_cast<double>(n)));
}

// n draws of N(mu*, sigma^2) truncated to the bounds.
inline Dataset GaussianDataDraw(double mu, double sigma, std::size_t n,
                                const Bounds& bounds, RngStream& rng) {
  detail::Require(n >= 1, ErrorCode::kInvalidSampleSize, "n must be >= 1");
  detail::Require(sigma > 0, ErrorCode::kInvalidConfig, "sigma must be > 0");
  const TruncatedNormalSampler sampler(mu, sigma, bounds.lower, bounds.upper);
  Dataset out{std::vector<double>(n), bounds};
  for (double& x : out.values) x = sampler(rng);
  return out;
}

class GaussianKnownVarianceModel {
 public:
  struct Parameters {
    double mu = 0.0;
  };

  explicit GaussianKnownVarianceModel(double sigma) : sigma_(sigma) {
    detail::Require(std::isfinite(sigma) && sigma > 0, ErrorCode::kInvalidConfig,
                    "sigma must be positive");
  }

  double sigma() const { return sigma_; }

  SufficientStatVector SufficientStats(const Dataset& data) const {
    return GaussianSufficientStats(data);
  }

  Parameters PosteriorDraw(const SufficientStatVector& stat, std::size_t n,
                           RngStream& rng) const {
    return {GaussianPosteriorDraw(stat.values.at(0), n, sigma_, rng)};
  }

  Dataset DataDraw(const Parameters& params, std::size_t n,
                   const Bounds& bounds, RngStream& rng) const {
    return GaussianDataDraw(params.mu, sigma_, n, bounds, rng);
  }

  // Sample mean, with within-set variance s^2 / n.
  Estimate EstimateFrom(const Dataset& data) const {
    return {SampleMean(data.values),
            SampleVariance(data.values) / static_cast<double>(data.size())};
  }

 private:
  double sigma_;
};

// ---------------------------------------------------------------------------
// Bernoulli records with a Beta prior. Not part of the Gaussian study; it
// makes the full pipeline discrete so its privacy can be enumerated exactly.

inline constexpr std::size_t kMaxEnumerationN = 12;

class BernoulliBetaModel {
 public:
  struct Parameters {
    double p = 0.5;
  };

  BernoulliBetaModel(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    detail::Require(std::isfinite(alpha) && alpha > 0 && std::isfinite(beta) &&
                        beta > 0,
                    ErrorCode::kInvalidConfig, "Beta prior needs alpha, beta > 0");
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // Count of ones; sensitivity 1, bounded in [0, n].
  SufficientStatVector SufficientStats(const Dataset& data) const {
    data.Validate();
    double count = 0.0;
    for (double x : data.values) {
      detail::Require(x == 0.0 || x == 1.0, ErrorCode::kValueOutOfBounds,
                      "Bernoulli records must be 0 or 1");
      count += x;
    }
    return SufficientStatVector{
        {count},
        {1.0},
        std::vector<Bounds>{Bounds{0.0, static_cast<double>(data.size())}}};
  }

  // p* ~ Beta(alpha + k*, beta + n - k*), with k* clamped into [0, n] so
  // unbounded sanitizers still give a proper posterior.
  Parameters PosteriorDraw(const SufficientStatVector& stat, std::size_t n,
                           RngStream& rng) const {
    const double k = std::clamp(stat.values.at(0), 0.0, static_cast<double>(n));
    return {Beta(rng, alpha_ + k, beta_ + static_cast<double>(n) - k)};
  }

  Dataset DataDraw(const Parameters& params, std::size_t n,
                   const Bounds& bounds, RngStream& rng) const {
    Dataset out{std::vector<double>(n), bounds};
    for (double& x : out.values) x = Bernoulli(rng, params.p) ? 1.0 : 0.0;
    return out;
  }

  Estimate EstimateFrom(const Dataset& data) const {
    const double p = SampleMean(data.values);
    return {p, p * (1.0 - p) / static_cast<double>(data.size())};
  }

  // Candidate set {0, ..., n} for the discrete exponential sanitizer.
  static std::vector<double> CountCandidates(std::size_t n) {
    std::vector<double> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) c[i] = static_cast<double>(i);
    return c;
  }

 private:
  double alpha_;
  double beta_;
};

// log of BetaBinomial(j; n, a, b).
inline double LogBetaBinomialPmf(std::size_t j, std::size_t n, double a,
                                 double b) {
  const double nd = static_cast<double>(n);
  const double jd = static_cast<double>(j);
  const double log_choose =
      std::lgamma(nd + 1) - std::lgamma(jd + 1) - std::lgamma(nd - jd + 1);
  auto log_beta = [](double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
  };
  return log_choose + log_beta(jd + a, nd - jd + b) - log_beta(a, b);
}

// Row-major (n + 1) x (n + 1) matrix with entry [k][j] = P(synthetic count j
// | original count k) for: k* from the exponential mechanism over {0..n}
// with utility -|k* - k| (delta_u = 1) at `epsilon`, then p* from the Beta
// posterior, then n Bernoulli(p*) records. Marginalizing p* gives the
// Beta-Binomial predictive, so the result is exact.
inline std::vector<double> BernoulliPipelineDistribution(std::size_t n,
                                                         double alpha,
                                                         double beta,
                                                         double epsilon) {
  detail::Require(n >= 1, ErrorCode::kInvalidSampleSize, "n must be >= 1");
  detail::Require(n <= kMaxEnumerationN, ErrorCode::kDomainTooLarge,
                  "n = " + std::to_string(n) + " exceeds " +
                      std::to_string(kMaxEnumerationN));
  const BernoulliBetaModel model(alpha, beta);
  const std::size_t size = n + 1;
  const std::vector<double> candidates = BernoulliBetaModel::CountCandidates(n);

  // predictive[k*][j]
  std::vector<double> predictive(size * size);
  for (std::size_t ks = 0; ks < size; ++ks) {
    const double a = model.alpha() + static_cast<double>(ks);
    const double b = model.beta() + static_cast<double>(n - ks);
    for (std::size_t j = 0; j < size; ++j) {
      predictive[ks * size + j] = std::exp(LogBetaBinomialPmf(j, n, a, b));
    }
  }

  std::vector<double> out(size * size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    const std::vector<double> scores =
        DistanceScores(candidates, static_cast<double>(k));
    const std::vector<double> sanitized =
        ExponentialProbabilities(scores, 1.0, epsilon);
    for (std::size_t ks = 0; ks < size; ++ks) {
      for (std::size_t j = 0; j < size; ++j) {
        out[k * size + j] += sanitized[ks] * predictive[ks * size + j];
      }
    }
  }
  return out;
}

}  // namespace modips
