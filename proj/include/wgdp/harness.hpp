//
// Copyright 2026 The wgdp Authors
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
//

// Experiment orchestration: configuration, excess-risk estimation against
// baselines, seeded suites and sweeps, CSV output.

#ifndef WGDP_HARNESS_HPP_
#define WGDP_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wgdp/empirical.hpp"
#include "wgdp/mechanisms.hpp"
#include "wgdp/problem.hpp"

namespace wgdp {

inline constexpr const char* kConfigSchema = "wgdp-config/1";
inline constexpr int kCsvSchemaVersion = 1;

enum class Algorithm { kPhasedErm, kOcoGame, kMgr, kAgs, kNonprivateBaseline };
std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

enum class EvalMode { kPopulation, kEmpirical };
enum class BaselineMode { kAuto, kAnalytic, kGrid, kNonprivate };
std::string to_string(BaselineMode mode);
BaselineMode baseline_mode_from_string(const std::string& name);

struct InstanceConfig {
  // two-point | random-affine | random-hinge | hard | file
  std::string kind = "two-point";
  std::size_t support = 8;
  double diameter = 2.0;
  std::uint64_t seed = 7;
  // hard only: base kind (random-affine | random-hinge | two-point), mode
  // (population | empirical) and records per group in empirical mode
  std::string base = "random-affine";
  std::string reduction = "population";
  std::size_t hard_n = 16;
  std::string path;  // file only
};

struct SolverConfig {
  std::optional<double> eta;            // phased ERM eta / FTRL eta override
  std::optional<std::uint64_t> rounds;  // MGR / AGS T override
  RateMultipliers multipliers;
  double kappa = 0.05;
};

struct EvaluationConfig {
  EvalMode mode = EvalMode::kPopulation;
  BaselineMode baseline = BaselineMode::kAuto;
  std::size_t n_eval = 10000;  // Monte Carlo samples per group
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kPhasedErm;
  InstanceConfig instance;
  std::uint64_t K = 1024;
  std::size_t p = 2;
  std::size_t d = 1;
  double epsilon = 1.0;
  double delta = 1e-5;
  std::vector<std::uint64_t> seeds{1};
  EvaluationConfig evaluation;
  SolverConfig solver;
  std::string output;
  bool timing = false;

  // Throws InvalidArgument on any inconsistency.
  void validate() const;
};

// JSON round trip. Unknown keys are rejected; "epsilon" accepts a number or
// the string "inf".
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// The instance a config describes; its p and d must match the config.
Instance build_instance(const ExperimentConfig& config);

struct Baseline {
  double value = 0.0;
  std::string mode;  // analytic | grid | nonprivate
  // Known error of the value itself: grid spacing times L, or the Monte
  // Carlo standard error of the non-private reference.
  double tolerance = 0.0;
};

inline constexpr std::size_t kGridPoints = 10000;

// Baseline hierarchy for kAuto: analytic optimum, else a grid over W for
// d <= 2, else the non-private regularized ERM with a 4K sample budget.
// `rng` feeds the non-private reference only. UnsupportedMode when the
// requested mode is unavailable for the instance.
Baseline compute_baseline(const Instance& instance, BaselineMode mode,
                          std::uint64_t K, std::size_t n_eval,
                          RandomStream& rng);

// Worst-group population risk: exact over finite supports, Monte Carlo
// (n_eval samples per group, from `rng`) otherwise.
RiskEstimate population_worst_group_risk(const Instance& instance,
                                         std::span<const double> w,
                                         std::size_t n_eval,
                                         RandomStream& rng);

struct ExcessEstimate {
  double risk_raw = 0.0;        // R(w_out)
  double risk_projected = 0.0;  // R(Proj_W(w_out))
  double baseline = 0.0;
  double excess = 0.0;          // risk_projected - baseline
  double std_error = 0.0;
  std::string baseline_mode;
};

// Population mode. For the empirical mode pass the collection.
ExcessEstimate estimate_excess_risk(std::span<const double> w_out,
                                    const Instance& instance,
                                    const Baseline& baseline,
                                    std::size_t n_eval, RandomStream& rng);
ExcessEstimate estimate_excess_risk(std::span<const double> w_out,
                                    const Instance& instance,
                                    BaselineMode baseline_mode,
                                    std::uint64_t K, std::size_t n_eval,
                                    RandomStream& rng);

// Worst-group empirical excess over a fixed collection against the grid
// minimum of max_i L_{S_i} (d <= 2) or, for deterministic instances, the
// analytic optimum.
ExcessEstimate estimate_empirical_excess_risk(std::span<const double> w_out,
                                              const DatasetCollection& data,
                                              const Instance& instance);

struct TrialResult {
  std::uint64_t seed = 0;
  double risk_raw = 0.0;
  double risk_projected = 0.0;
  double baseline = 0.0;
  double excess = 0.0;
  std::uint64_t draws_used = 0;
  std::optional<double> wall_ms;
  std::string status = "ok";  // ok | ok:rounds_capped | error:<message>
  bool ok() const { return status.rfind("ok", 0) == 0; }
};

// One seed of one configuration. Stream layout under RandomStream(seed):
// child 0 feeds the sample oracles, child 1 the algorithm, child 2 the
// evaluation. Solver errors are caught into `status`.
TrialResult run_trial(const ExperimentConfig& config, const Instance& instance,
                      const Baseline& baseline, std::uint64_t seed);

struct SuiteRow {
  ExperimentConfig point;
  TrialResult trial;
};

struct SuiteSummary {
  std::size_t ok = 0;
  double mean_risk_raw = 0.0;
  double mean_risk_projected = 0.0;
  double mean_excess = 0.0;
  double mean_baseline = 0.0;
  double se_excess = 0.0;
  std::uint64_t max_draws = 0;
};

SuiteSummary summarize(std::span<const TrialResult> trials);

struct SuiteResult {
  ExperimentConfig config;
  Baseline baseline;
  std::vector<TrialResult> trials;
  SuiteSummary summary;
};

SuiteResult run_suite(const ExperimentConfig& config);

// One suite per value of `param` (K | eps | delta | p | d), in the given
// order.
std::vector<SuiteResult> run_sweep(const ExperimentConfig& config,
                                   const std::string& param,
                                   const std::vector<std::string>& values);

// Applies a single override (the sweep parameters plus "seed").
void apply_override(ExperimentConfig& config, const std::string& param,
                    const std::string& value);

// ---- CSV ---------------------------------------------------------------------

std::string csv_header();
// Data rows in seed order followed by the summary row.
std::string csv_rows(const SuiteResult& suite);
std::string to_csv(std::span<const SuiteResult> suites);
// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite.
std::string format_double(double value);

}  // namespace wgdp

#endif  // WGDP_HARNESS_HPP_
