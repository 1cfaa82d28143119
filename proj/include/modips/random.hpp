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

// Reproducible random streams.
//
// Every stochastic routine in the library takes an `RngStream&` and draws
// only through the helpers below, so results are a pure function of the
// stream state on any platform. Streams are derived from a master seed by
// hashing an index path, e.g. Derive(seed, {cell, replicate, k}); sibling
// streams never overlap in practice and adding a new path does not perturb
// existing ones.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include <boost/math/distributions/normal.hpp>

namespace modips {

// SplitMix64 finalizer; used for seeding and path hashing.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return Mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** seeded through SplitMix64. Satisfies
// std::uniform_random_bit_generator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) {
    SplitMix64 seeder(seed);
    for (auto& word : state_) word = seeder.Next();
  }

  // Stream for an index path under `master`. Order of the path matters.
  static RngStream Derive(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = Mix64(master ^ 0x6A09E667F3BCC909ULL);
    for (std::uint64_t index : path) {
      h = Mix64(h + 0x9E3779B97F4A7C15ULL + Mix64(index));
    }
    return RngStream(h);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  bool operator==(const RngStream&) const = default;

 private:
  std::array<std::uint64_t, 4> state_{};
};

// Uniform on the open interval (0, 1) with 53 bits of resolution.
inline double UniformOpen(RngStream& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double NormalQuantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double NormalCdf(double z) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

// Standard normal by inversion (one uniform per draw).
inline double StandardNormal(RngStream& rng) {
  return NormalQuantile(UniformOpen(rng));
}

inline double Normal(RngStream& rng, double mean, double sd) {
  return mean + sd * StandardNormal(rng);
}

// Normal(mean, sd^2) restricted to [lower, upper], by inversion of the
// restricted CDF. Works on the side of the mean that keeps the retained
// probability mass away from 1 so tails do not lose precision. The CDF at the
// bounds is computed once per sampler.
class TruncatedNormalSampler {
 public:
  TruncatedNormalSampler(double mean, double sd, double lower, double upper)
      : mean_(mean), sd_(sd), lower_(lower), upper_(upper) {
    a_ = (lower - mean) / sd;
    b_ = (upper - mean) / sd;
    if (a_ > 0) {
      const double na = -b_;
      b_ = -a_;
      a_ = na;
      flipped_ = true;
    }
    fa_ = NormalCdf(a_);
    fb_ = NormalCdf(b_);
  }

  double operator()(RngStream& rng) const {
    const double u = UniformOpen(rng);
    double z = NormalQuantile(fa_ + u * (fb_ - fa_));
    if (!(z >= a_)) z = a_;
    if (!(z <= b_)) z = b_;
    if (flipped_) z = -z;
    const double x = mean_ + sd_ * z;
    return x < lower_ ? lower_ : (x > upper_ ? upper_ : x);
  }

 private:
  double mean_;
  double sd_;
  double lower_;
  double upper_;
  double a_ = 0.0;
  double b_ = 0.0;
  double fa_ = 0.0;
  double fb_ = 1.0;
  bool flipped_ = false;
};

inline double TruncatedNormal(RngStream& rng, double mean, double sd,
                              double lower, double upper) {
  return TruncatedNormalSampler(mean, sd, lower, upper)(rng);
}

// Marsaglia-Tsang; shape < 1 handled by the usual U^(1/shape) boost.
inline double Gamma(RngStream& rng, double shape) {
  if (shape < 1.0) {
    const double u = UniformOpen(rng);
    return Gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = StandardNormal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = UniformOpen(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double Beta(RngStream& rng, double alpha, double beta) {
  const double x = Gamma(rng, alpha);
  const double y = Gamma(rng, beta);
  return x / (x + y);
}

inline bool Bernoulli(RngStream& rng, double p) { return UniformOpen(rng) < p; }

}  // namespace modips
