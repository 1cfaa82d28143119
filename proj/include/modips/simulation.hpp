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

// Monte Carlo study of the Gaussian-mean release.
//
// A cell is (n, bounds, mechanism, m). Each replicate draws an original
// dataset from N(mu, sigma^2) truncated to the bounds, releases m synthetic
// sets, estimates mu by each synthetic sample mean and builds an interval
// (combining rule for m >= 2, uncorrected normal interval for m = 1).
//
// Seeds: cell streams are keyed by the cell's values, not its position in
// the grid, and replicate r of a cell uses Derive(cell_seed, {r, ...}). Adding
// or reordering cells leaves every other cell's numbers unchanged, and the
// thread count never changes results.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "modips/error.hpp"
#include "modips/inference.hpp"
#include "modips/mechanisms.hpp"
#include "modips/models.hpp"
#include "modips/random.hpp"
#include "modips/release.hpp"

namespace modips {

struct SimConfig {
  std::vector<std::size_t> n_values{100, 1000};
  std::vector<Bounds> bounds_list{{-4.0, 4.0}, {-4.0, 5.0}};
  std::vector<std::size_t> m_values{1, 2, 5, 10, 20, 40};
  double epsilon = 1.0;
  std::size_t replicates = 500;
  std::vector<MechanismKind> mechanisms{MechanismKind::kTruncatedLaplace,
                                        MechanismKind::kBitLaplace};
  double mu = 0.0;
  double sigma = 1.0;
  std::uint64_t seed = 20260101;
  double level = 0.95;
  // 0 = hardware concurrency.
  unsigned threads = 0;

  void Validate() const {
    auto bad = [](const std::string& what) {
      return Error(ErrorCode::kInvalidConfig, what);
    };
    if (n_values.empty() || bounds_list.empty() || m_values.empty() ||
        mechanisms.empty()) {
      throw bad("n_values, bounds_list, m_values and mechanisms must be nonempty");
    }
    for (std::size_t n : n_values) {
      if (n < 2) throw bad("every n must be >= 2");
    }
    for (std::size_t m : m_values) {
      if (m < 1) throw bad("every m must be >= 1");
    }
    for (const Bounds& b : bounds_list) {
      Bounds::Make(b.lower, b.upper);
      if (!b.Contains(mu)) throw bad("mu must lie inside every bounds entry");
    }
    for (MechanismKind k : mechanisms) {
      if (k != MechanismKind::kTruncatedLaplace && k != MechanismKind::kBitLaplace) {
        throw bad("simulation mechanisms must be truncated-laplace or bit-laplace");
      }
    }
    if (!(std::isfinite(epsilon) && epsilon > 0)) throw bad("epsilon must be > 0");
    if (replicates < 1) throw bad("replicates must be >= 1");
    if (!(std::isfinite(sigma) && sigma > 0)) throw bad("sigma must be > 0");
    if (!(level > 0 && level < 1)) throw bad("level must be in (0, 1)");
  }
};

struct SimCell {
  std::size_t n = 0;
  Bounds bounds;
  MechanismKind mechanism = MechanismKind::kTruncatedLaplace;
  std::size_t m = 1;

  auto Key() const {
    return std::make_tuple(n, bounds.lower, bounds.upper,
                           std::string(MechanismName(mechanism)), m);
  }

  std::string Describe() const {
    return "n=" + std::to_string(n) + " bounds=[" +
           detail::FormatDouble(bounds.lower) + "," +
           detail::FormatDouble(bounds.upper) + "] mechanism=" +
           std::string(MechanismName(mechanism)) + " m=" + std::to_string(m);
  }

  // Value-keyed seed for this cell.
  std::uint64_t Seed(std::uint64_t master) const {
    RngStream stream = RngStream::Derive(
        master, {n, std::bit_cast<std::uint64_t>(bounds.lower),
                 std::bit_cast<std::uint64_t>(bounds.upper),
                 static_cast<std::uint64_t>(mechanism), m});
    return stream();
  }
};

struct SimResultRow {
  std::size_t n = 0;
  Bounds bounds;
  MechanismKind mechanism = MechanismKind::kTruncatedLaplace;
  std::size_t m = 1;
  double epsilon = 1.0;
  std::size_t replicates = 0;
  double bias = 0.0;
  double mean_varpi = 0.0;
  double mean_u = 0.0;
  double emp_var = 0.0;
  double cp = 0.0;
};

// Per-replicate outcome.
struct ReplicateOutcome {
  double original_stat = 0.0;
  double theta_bar = 0.0;
  double varpi = 0.0;
  double u = 0.0;
  bool covered = false;
  std::vector<double> sanitized;  // m sanitized statistics
};

struct CellResult {
  SimCell cell;
  SimResultRow row;
  // Filled when draws are kept; indexed by replicate.
  std::vector<ReplicateOutcome> replicates;
};

inline ReplicateOutcome RunReplicate(const SimConfig& config, const SimCell& cell,
                                     std::uint64_t cell_seed, std::size_t r) {
  const GaussianKnownVarianceModel model(config.sigma);
  RngStream data_rng = RngStream::Derive(cell_seed, {r, 0});
  const Dataset original =
      GaussianDataDraw(config.mu, config.sigma, cell.n, cell.bounds, data_rng);

  ReleasePlan plan;
  plan.m = cell.m;
  plan.t = 1;
  plan.epsilon = config.epsilon;
  plan.mechanism.kind = cell.mechanism;
  RngStream plan_rng = RngStream::Derive(cell_seed, {r, 1});
  plan.seed = plan_rng();

  const SyntheticRelease release = ModipsRelease(model, original, plan);
  const std::vector<Estimate> estimates = EstimateRelease(model, release);

  ReplicateOutcome out;
  out.original_stat = SampleMean(original.values);
  out.sanitized.reserve(cell.m);
  for (const SanitizationRecord& s : release.sanitizations) {
    out.sanitized.push_back(s.sanitized.values.front());
  }

  CombinedInference inference;
  if (cell.m == 1) {
    inference = SingleReleaseInference(estimates[0].value,
                                       estimates[0].within_variance, config.level);
  } else {
    std::vector<double> values;
    std::vector<double> within;
    for (const Estimate& e : estimates) {
      values.push_back(e.value);
      within.push_back(e.within_variance);
    }
    inference = Combine(values, within, config.level);
  }
  out.theta_bar = inference.theta_bar;
  out.varpi = inference.varpi;
  out.u = inference.u;
  out.covered = inference.Covers(config.mu);
  return out;
}

inline SimResultRow Summarize(const SimConfig& config, const SimCell& cell,
                              const std::vector<ReplicateOutcome>& outcomes) {
  SimResultRow row;
  row.n = cell.n;
  row.bounds = cell.bounds;
  row.mechanism = cell.mechanism;
  row.m = cell.m;
  row.epsilon = config.epsilon;
  row.replicates = outcomes.size();
  std::vector<double> theta;
  theta.reserve(outcomes.size());
  double varpi = 0.0;
  double u = 0.0;
  std::size_t covered = 0;
  for (const ReplicateOutcome& o : outcomes) {
    theta.push_back(o.theta_bar);
    varpi += o.varpi;
    u += o.u;
    covered += o.covered ? 1 : 0;
  }
  const double count = static_cast<double>(outcomes.size());
  row.bias = SampleMean(theta) - config.mu;
  row.mean_varpi = varpi / count;
  row.mean_u = u / count;
  row.emp_var = SampleVariance(theta);
  row.cp = static_cast<double>(covered) / count;
  return row;
}

// Runs one cell; replicates are spread across threads and gathered in
// replicate order. Any replicate failure aborts the cell.
inline CellResult RunCell(const SimConfig& config, const SimCell& cell,
                          bool keep_draws = false) {
  const std::uint64_t cell_seed = cell.Seed(config.seed);
  std::vector<ReplicateOutcome> outcomes(config.replicates);

  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, config.replicates));

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned worker) {
    for (std::size_t r = worker; r < config.replicates; r += threads) {
      try {
        outcomes[r] = RunReplicate(config, cell, cell_seed, r);
        if (!keep_draws) outcomes[r].sanitized = {};
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kInvalidConfig,
                  "cell " + cell.Describe() + " aborted: " + e.what());
    }
  }

  CellResult result{cell, Summarize(config, cell, outcomes), {}};
  if (keep_draws) result.replicates = std::move(outcomes);
  return result;
}

inline std::vector<SimCell> EnumerateCells(const SimConfig& config) {
  std::vector<SimCell> cells;
  for (std::size_t n : config.n_values) {
    for (const Bounds& b : config.bounds_list) {
      for (MechanismKind kind : config.mechanisms) {
        for (std::size_t m : config.m_values) cells.push_back({n, b, kind, m});
      }
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const SimCell& a, const SimCell& b) { return a.Key() < b.Key(); });
  cells.erase(std::unique(cells.begin(), cells.end(),
                          [](const SimCell& a, const SimCell& b) {
                            return a.Key() == b.Key();
                          }),
              cells.end());
  return cells;
}

// All cells of the grid, sorted by (n, bounds, mechanism, m).
inline std::vector<SimResultRow> RunSimulation(const SimConfig& config) {
  config.Validate();
  std::vector<SimResultRow> rows;
  for (const SimCell& cell : EnumerateCells(config)) {
    rows.push_back(RunCell(config, cell).row);
  }
  return rows;
}

}  // namespace modips
