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

// File formats: one-column dataset CSV, simulation results CSV, inference
// CSV, release manifest and simulation config (JSON).
//
// Numbers are written with std::to_chars (shortest round-trip form), so
// output bytes depend only on the values.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "json.hpp"
#include "modips/budget.hpp"
#include "modips/error.hpp"
#include "modips/inference.hpp"
#include "modips/mechanisms.hpp"
#include "modips/models.hpp"
#include "modips/release.hpp"
#include "modips/simulation.hpp"

namespace modips {

inline constexpr std::string_view kResultsCsvHeader =
    "n,bounds_lo,bounds_hi,mechanism,m,epsilon,replicates,bias,mean_varpi,"
    "mean_u,emp_var,cp";

inline constexpr std::string_view kInferenceCsvHeader =
    "theta_bar,varpi,b,u,nu,ci_lower,ci_upper,method";

inline std::string FormatNumber(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  return detail::FormatDouble(value);
}

namespace detail {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double ParseNumber(std::string_view text, std::size_t line) {
  std::string_view t = Trim(text);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::kIo, "line " + std::to_string(line) +
                                    ": not a finite number: '" +
                                    std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

// One column with a header row. Blank lines are ignored.
inline std::vector<double> ReadColumnCsv(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view trimmed = detail::Trim(line);
    if (trimmed.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    if (trimmed.find(',') != std::string_view::npos) {
      throw Error(ErrorCode::kIo, "line " + std::to_string(number) +
                                      ": expected a single column");
    }
    values.push_back(detail::ParseNumber(trimmed, number));
  }
  if (!header_seen) throw Error(ErrorCode::kIo, "missing header row");
  return values;
}

inline void WriteDatasetCsv(std::ostream& out, const Dataset& data,
                            std::string_view column = "x") {
  out << column << "\n";
  for (double v : data.values) out << FormatNumber(v) << "\n";
}

inline void WriteResultsCsv(std::ostream& out,
                            const std::vector<SimResultRow>& rows) {
  out << kResultsCsvHeader << "\n";
  for (const SimResultRow& r : rows) {
    out << r.n << "," << FormatNumber(r.bounds.lower) << ","
        << FormatNumber(r.bounds.upper) << "," << MechanismName(r.mechanism)
        << "," << r.m << "," << FormatNumber(r.epsilon) << "," << r.replicates
        << "," << FormatNumber(r.bias) << "," << FormatNumber(r.mean_varpi) << ","
        << FormatNumber(r.mean_u) << "," << FormatNumber(r.emp_var) << ","
        << FormatNumber(r.cp) << "\n";
  }
}

inline void WriteInferenceCsv(std::ostream& out,
                              const std::vector<CombinedInference>& rows) {
  out << kInferenceCsvHeader << "\n";
  for (const CombinedInference& r : rows) {
    out << FormatNumber(r.theta_bar) << "," << FormatNumber(r.varpi) << ","
        << (r.b ? FormatNumber(*r.b) : "") << "," << FormatNumber(r.u) << ","
        << FormatNumber(r.nu) << "," << FormatNumber(r.ci_lower) << ","
        << FormatNumber(r.ci_upper) << "," << r.method << "\n";
  }
}

inline nlohmann::ordered_json LedgerToJson(const BudgetLedger& ledger) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const BudgetEntry& e : ledger.entries()) {
    nlohmann::ordered_json entry{{"label", e.label}, {"epsilon", e.epsilon}};
    entry["group"] = e.group ? nlohmann::ordered_json(*e.group) : nullptr;
    entries.push_back(std::move(entry));
  }
  return {{"total_epsilon", ledger.total_epsilon()},
          {"composed_epsilon", ledger.ComposedTotal()},
          {"entries", std::move(entries)}};
}

// Manifest of a release. `files` holds the dataset file names in release
// order (may be empty).
inline nlohmann::ordered_json ReleaseManifest(
    const SyntheticRelease& release, std::string_view model,
    const std::vector<std::string>& files = {}) {
  const ReleasePlan& plan = release.plan;
  nlohmann::ordered_json mode;
  if (std::holds_alternative<Conjoint>(plan.mode)) {
    mode = "conjoint";
  } else {
    mode = {{"individual", std::get<Individual>(plan.mode).weights}};
  }
  nlohmann::ordered_json plan_json{
      {"model", model},
      {"m", plan.m},
      {"t", plan.t},
      {"epsilon", plan.epsilon},
      {"mechanism", MechanismName(plan.mechanism.kind)},
      {"mode", mode},
      {"seed", plan.seed}};
  if (plan.mechanism.kind == MechanismKind::kExponentialDiscrete) {
    plan_json["candidates"] = plan.mechanism.candidates;
  }

  nlohmann::ordered_json sanitizations = nlohmann::ordered_json::array();
  for (const SanitizationRecord& s : release.sanitizations) {
    sanitizations.push_back({{"k", s.k + 1},
                             {"values", s.sanitized.values},
                             {"scales", s.scales},
                             {"epsilon", s.epsilon}});
  }
  nlohmann::ordered_json datasets = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < release.datasets.size(); ++i) {
    const SyntheticDataset& d = release.datasets[i];
    nlohmann::ordered_json entry{{"k", d.k + 1}, {"l", d.l + 1}, {"n", d.data.size()}};
    if (i < files.size()) entry["file"] = files[i];
    datasets.push_back(std::move(entry));
  }
  return {{"plan", std::move(plan_json)},
          {"per_release_epsilon", release.per_release_epsilon},
          {"bounds", {release.datasets.front().data.bounds.lower,
                      release.datasets.front().data.bounds.upper}},
          {"sanitizations", std::move(sanitizations)},
          {"datasets", std::move(datasets)},
          {"ledger", LedgerToJson(release.ledger)}};
}

// Config keys mirror SimConfig field names. Unknown keys are rejected.
inline SimConfig SimConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  SimConfig config;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_values") {
        config.n_values = value.get<std::vector<std::size_t>>();
      } else if (key == "bounds_list") {
        config.bounds_list.clear();
        for (const auto& pair : value) {
          const auto b = pair.get<std::vector<double>>();
          if (b.size() != 2) {
            throw Error(ErrorCode::kInvalidConfig, "bounds entries are [lo, hi]");
          }
          config.bounds_list.push_back(Bounds::Make(b[0], b[1]));
        }
      } else if (key == "m_values") {
        config.m_values = value.get<std::vector<std::size_t>>();
      } else if (key == "epsilon") {
        config.epsilon = value.get<double>();
      } else if (key == "replicates") {
        config.replicates = value.get<std::size_t>();
      } else if (key == "mechanisms") {
        config.mechanisms.clear();
        for (const auto& name : value) {
          config.mechanisms.push_back(ParseMechanism(name.get<std::string>()));
        }
      } else if (key == "mu") {
        config.mu = value.get<double>();
      } else if (key == "sigma") {
        config.sigma = value.get<double>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "level") {
        config.level = value.get<double>();
      } else if (key == "threads") {
        config.threads = value.get<unsigned>();
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  config.Validate();
  return config;
}

inline nlohmann::ordered_json SimConfigToJson(const SimConfig& c) {
  nlohmann::ordered_json bounds = nlohmann::ordered_json::array();
  for (const Bounds& b : c.bounds_list) bounds.push_back({b.lower, b.upper});
  std::vector<std::string> mechanisms;
  for (MechanismKind k : c.mechanisms) mechanisms.emplace_back(MechanismName(k));
  return {{"n_values", c.n_values}, {"bounds_list", bounds},
          {"m_values", c.m_values}, {"epsilon", c.epsilon},
          {"replicates", c.replicates}, {"mechanisms", mechanisms},
          {"mu", c.mu}, {"sigma", c.sigma}, {"seed", c.seed},
          {"level", c.level}, {"threads", c.threads}};
}

}  // namespace modips
