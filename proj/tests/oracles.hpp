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

// Test-only reference computations. Nothing here calls into the library's
// numeric routines; each oracle is a direct, slow evaluation of the defining
// formula.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace modips::testing {

// Composite Simpson rule with `intervals` (even) panels.
inline double Simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals) {
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

inline double StudentTDensity(double x, double nu) {
  const double log_c = std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu) -
                       0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_c - 0.5 * (nu + 1) * std::log1p(x * x / nu));
}

// P(T <= x) for x >= 0 by integrating the density over [0, x].
inline double StudentTCdfByQuadrature(double x, double nu) {
  return 0.5 + Simpson([nu](double t) { return StudentTDensity(t, nu); }, 0.0,
                       x, 20000);
}

// Upper quantile (p > 1/2) by bisection on the quadrature CDF.
inline double StudentTQuantileByQuadrature(double nu, double p) {
  double lo = 0.0;
  double hi = 50.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (StudentTCdfByQuadrature(mid, nu) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Beta-Binomial pmf by integrating Binomial(j; n, p) * Beta(p; a, b) over p.
inline double BetaBinomialByQuadrature(int j, int n, double a, double b) {
  const double log_beta_ab = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
  // x * log(y) with 0 * log(0) = 0, so unit exponents keep their endpoint mass.
  auto xlogy = [](double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); };
  auto integrand = [&](double p) {
    return std::exp(log_choose + xlogy(j + a - 1, p) + xlogy(n - j + b - 1, 1.0 - p) -
                    log_beta_ab);
  };
  return Simpson(integrand, 0.0, 1.0, 200000);
}

// Largest |mean(x) - mean(x')| over all datasets x in domain^n and all x'
// obtained by replacing one record.
inline double BruteForceMeanSensitivity(const std::vector<double>& domain,
                                        std::size_t n) {
  std::vector<std::size_t> index(n, 0);
  double worst = 0.0;
  for (;;) {
    double sum = 0.0;
    for (std::size_t i : index) sum += domain[i];
    for (std::size_t pos = 0; pos < n; ++pos) {
      for (double replacement : domain) {
        const double other = sum - domain[index[pos]] + replacement;
        worst = std::max(worst, std::abs(sum - other) / static_cast<double>(n));
      }
    }
    std::size_t pos = 0;
    while (pos < n && ++index[pos] == domain.size()) index[pos++] = 0;
    if (pos == n) break;
  }
  return worst;
}

}  // namespace modips::testing
