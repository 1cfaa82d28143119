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

// modips command line: synthesize, simulate, verify-dp.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error,
// 3 privacy verification failed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modips/modips.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerifyFail = 3;

modips::Bounds ParseBounds(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw modips::Error(modips::ErrorCode::kInvalidConfig,
                        "--bounds expects LO,HI, got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, comma);
    const std::string hi_text = text.substr(comma + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument(lo_text);
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument(hi_text);
    return modips::Bounds::Make(lo, hi);
  } catch (const std::logic_error&) {
    throw modips::Error(modips::ErrorCode::kInvalidConfig,
                        "--bounds expects LO,HI, got '" + text + "'");
  }
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw modips::Error(modips::ErrorCode::kIo, "cannot write " + path.string());
  }
  out << contents;
  if (!out) {
    throw modips::Error(modips::ErrorCode::kIo, "write failed: " + path.string());
  }
}

struct SynthesizeOptions {
  std::string input;
  std::string bounds;
  std::string output_dir;
  std::string model = "gaussian";
  std::string mechanism = "truncated-laplace";
  double epsilon = 1.0;
  std::size_t m = 1;
  std::size_t t = 1;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double level = 0.95;
};

template <typename Model>
int SynthesizeWith(const Model& model, const modips::Dataset& data,
                   const modips::ReleasePlan& plan, const SynthesizeOptions& opt) {
  const modips::SyntheticRelease release =
      plan.t == 1 ? modips::ModipsRelease(model, data, plan)
                  : modips::NestedModipsRelease(model, data, plan);

  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);
  std::vector<std::string> files;
  for (const modips::SyntheticDataset& d : release.datasets) {
    std::string name = "synthetic_" + std::to_string(d.k + 1);
    if (plan.t > 1) name += "_" + std::to_string(d.l + 1);
    name += ".csv";
    std::ostringstream csv;
    modips::WriteDatasetCsv(csv, d.data);
    WriteFile(dir / name, csv.str());
    files.push_back(name);
  }
  WriteFile(dir / "manifest.json",
            modips::ReleaseManifest(release, opt.model, files).dump(2) + "\n");
  WriteFile(dir / "ledger.txt", release.ledger.ToText());

  const std::vector<modips::Estimate> estimates =
      modips::EstimateRelease(model, release);
  std::vector<modips::CombinedInference> rows;
  if (estimates.size() == 1) {
    rows.push_back(modips::SingleReleaseInference(
        estimates[0].value, estimates[0].within_variance, opt.level));
  } else {
    std::vector<double> values;
    std::vector<double> within;
    for (const modips::Estimate& e : estimates) {
      values.push_back(e.value);
      within.push_back(e.within_variance);
    }
    rows.push_back(modips::Combine(values, within, opt.level));
  }
  std::ostringstream inference;
  modips::WriteInferenceCsv(inference, rows);
  WriteFile(dir / "inference.csv", inference.str());

  std::cout << "wrote " << files.size() << " synthetic datasets to "
            << dir.string() << " (per-release epsilon "
            << modips::FormatNumber(release.per_release_epsilon) << ")\n";
  return kExitOk;
}

int RunSynthesize(const SynthesizeOptions& opt) {
  std::ifstream in(opt.input);
  if (!in) {
    throw modips::Error(modips::ErrorCode::kIo, "cannot read " + opt.input);
  }
  const modips::Bounds bounds = ParseBounds(opt.bounds);
  const modips::Dataset data =
      modips::Dataset::Make(modips::ReadColumnCsv(in), bounds);

  modips::ReleasePlan plan;
  plan.m = opt.m;
  plan.t = opt.t;
  plan.epsilon = opt.epsilon;
  plan.seed = opt.seed;
  plan.mechanism.kind = modips::ParseMechanism(opt.mechanism);
  plan.Validate();

  if (opt.model == "gaussian") {
    if (plan.mechanism.kind == modips::MechanismKind::kExponentialDiscrete) {
      throw modips::Error(modips::ErrorCode::kInvalidConfig,
                          "exponential-discrete needs a discrete model "
                          "(--model bernoulli)");
    }
    return SynthesizeWith(modips::GaussianKnownVarianceModel(opt.sigma), data,
                          plan, opt);
  }
  if (opt.model == "bernoulli") {
    if (plan.mechanism.kind == modips::MechanismKind::kExponentialDiscrete) {
      plan.mechanism.candidates =
          modips::BernoulliBetaModel::CountCandidates(data.size());
    }
    return SynthesizeWith(modips::BernoulliBetaModel(opt.alpha, opt.beta), data,
                          plan, opt);
  }
  throw modips::Error(modips::ErrorCode::kInvalidConfig,
                      "unknown model '" + opt.model + "'");
}

struct SimulateOptions {
  std::string config;
  std::string output_dir;
  std::optional<double> epsilon;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<double> level;
  std::vector<std::size_t> m_values;
  std::optional<unsigned> threads;
};

int RunSimulate(const SimulateOptions& opt) {
  modips::SimConfig config;
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) {
      throw modips::Error(modips::ErrorCode::kInvalidConfig,
                          "cannot read " + opt.config);
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw modips::Error(modips::ErrorCode::kInvalidConfig,
                          opt.config + ": " + e.what());
    }
    config = modips::SimConfigFromJson(j);
  }
  if (opt.epsilon) config.epsilon = *opt.epsilon;
  if (opt.replicates) config.replicates = *opt.replicates;
  if (opt.seed) config.seed = *opt.seed;
  if (opt.level) config.level = *opt.level;
  if (!opt.m_values.empty()) config.m_values = opt.m_values;
  if (opt.threads) config.threads = *opt.threads;
  config.Validate();

  const std::vector<modips::SimResultRow> rows = modips::RunSimulation(config);
  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  modips::WriteResultsCsv(csv, rows);
  WriteFile(dir / "results.csv", csv.str());
  WriteFile(dir / "config.json", modips::SimConfigToJson(config).dump(2) + "\n");
  std::cout << "wrote " << rows.size() << " cells to "
            << (dir / "results.csv").string() << "\n";
  return kExitOk;
}

struct VerifyOptions {
  std::string model = "bernoulli";
  std::string mechanism = "exponential-discrete";
  std::size_t n = 5;
  double epsilon = 1.0;
  std::optional<double> target;
  double alpha = 1.0;
  double beta = 1.0;
};

int RunVerify(const VerifyOptions& opt) {
  if (opt.model != "bernoulli") {
    throw modips::Error(modips::ErrorCode::kInvalidConfig,
                        "verify-dp supports --model bernoulli only");
  }
  const modips::BernoulliBetaModel model(opt.alpha, opt.beta);
  const modips::DiscreteChannel channel = modips::PipelineChannel(
      model, opt.n, opt.epsilon, modips::ParseMechanism(opt.mechanism));
  const modips::DpAudit audit =
      modips::MaxLogRatio(channel, modips::AdjacentPairs(channel.inputs()));
  const double target = opt.target.value_or(opt.epsilon);
  const bool pass = audit.Satisfies(target);
  std::cout << "max_log_ratio " << modips::FormatNumber(audit.max_log_ratio)
            << "\n"
            << "witness inputs=(" << audit.input_a << "," << audit.input_b
            << ") output=" << audit.output << "\n"
            << "target_epsilon " << modips::FormatNumber(target) << "\n"
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitVerifyFail;
}

bool IsConfigError(modips::ErrorCode code) {
  return code != modips::ErrorCode::kIo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modips: differentially private synthetic data releases"};
  app.require_subcommand(1);

  SynthesizeOptions synth;
  CLI::App* synthesize =
      app.add_subcommand("synthesize", "release m (or m x t) synthetic datasets");
  synthesize->add_option("--input", synth.input, "one-column CSV with header")
      ->required();
  synthesize->add_option("--bounds", synth.bounds, "declared bounds LO,HI")
      ->required()
      ->allow_extra_args(false);
  synthesize->add_option("--output-dir", synth.output_dir)->required();
  synthesize->add_option("--epsilon", synth.epsilon, "total privacy budget");
  synthesize->add_option("--m", synth.m, "number of sanitizations");
  synthesize->add_option("--t", synth.t, "syntheses per sanitization");
  synthesize->add_option("--mechanism", synth.mechanism,
                         "laplace | truncated-laplace | bit-laplace | "
                         "exponential-discrete");
  synthesize->add_option("--seed", synth.seed);
  synthesize->add_option("--model", synth.model, "gaussian | bernoulli");
  synthesize->add_option("--sigma", synth.sigma, "known sd (gaussian)");
  synthesize->add_option("--alpha", synth.alpha, "Beta prior alpha (bernoulli)");
  synthesize->add_option("--beta", synth.beta, "Beta prior beta (bernoulli)");
  synthesize->add_option("--level", synth.level, "confidence level");

  SimulateOptions sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "run the Monte Carlo coverage study");
  simulate->add_option("--config", sim.config, "JSON config");
  simulate->add_option("--output-dir", sim.output_dir)->required();
  simulate->add_option("--epsilon", sim.epsilon);
  simulate->add_option("--replicates", sim.replicates);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--level", sim.level);
  simulate->add_option("--m", sim.m_values, "override the m grid")->delimiter(',');
  simulate->add_option("--threads", sim.threads);

  VerifyOptions verify;
  CLI::App* verify_dp =
      app.add_subcommand("verify-dp", "exact privacy audit of a discrete pipeline");
  verify_dp->add_option("--model", verify.model, "bernoulli");
  verify_dp->add_option("--mechanism", verify.mechanism);
  verify_dp->add_option("--n", verify.n, "records (<= 8)");
  verify_dp->add_option("--epsilon", verify.epsilon);
  verify_dp->add_option("--target", verify.target,
                        "epsilon to verify against (default --epsilon)");
  verify_dp->add_option("--alpha", verify.alpha);
  verify_dp->add_option("--beta", verify.beta);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*synthesize) return RunSynthesize(synth);
    if (*simulate) return RunSimulate(sim);
    if (*verify_dp) return RunVerify(verify);
  } catch (const modips::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return IsConfigError(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
