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

// Minimax phased ERM: T = floor(log2(K/p)) phases, each solving the
// regularized objective on fresh samples anchored at the previous (noised)
// iterate, then adding Gaussian noise.

#ifndef WGDP_PHASED_ERM_HPP_
#define WGDP_PHASED_ERM_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wgdp/mechanisms.hpp"
#include "wgdp/problem.hpp"
#include "wgdp/saddle.hpp"

namespace wgdp {

struct PhaseRecord {
  std::size_t t = 0;          // 1-based phase index
  std::size_t n_t = 0;        // samples per group in this phase
  double eta_t = 0.0;         // eta 2^-t
  double mu_w = 0.0;          // 1 / (eta_t n_t)
  double mu_lambda = 0.0;     // 1 / (eta n)
  double alpha = 0.0;         // L^2/(8 n_t^2 mu_w) + B^2/(8 n_t^2 mu_lambda)
  double sigma = 0.0;         // noise standard deviation
};

struct PhasedSchedule {
  std::uint64_t K = 0;
  std::size_t p = 0;
  std::size_t n = 0;  // floor(K/p)
  std::size_t T = 0;  // floor(log2 n)
  double eta = 0.0;
  double lipschitz = 0.0;
  double range_bound = 0.0;
  double big_d = 0.0;
  PrivacyBudget budget;
  std::vector<PhaseRecord> phases;

  // p * sum_t n_t
  std::uint64_t total_draws() const;
};

// Floors everywhere: n = floor(K/p), T = floor(log2 n), n_t = floor(n/T).
// Throws InstanceTooSmall when K < 4p.
PhasedSchedule make_schedule(std::uint64_t K, std::size_t p, double eta,
                             double lipschitz, double range_bound,
                             double big_d, double epsilon, double delta);

// (M/D) min{ eps / sqrt(72 d ln(K/p) ln(1/delta)),
//            sqrt(p) / (ln(K)^(3/4) sqrt(K)) }
double default_eta(double diameter, double big_d, std::uint64_t K,
                   std::size_t p, double epsilon, double delta,
                   std::size_t dim);

// 6 D sqrt(log2(n) eta_t eta): the per-phase sensitivity bound.
double phase_sensitivity_bound(const PhasedSchedule& schedule,
                               std::size_t phase);

struct PhasedOptions {
  // Starting point w_0; empty means the center of W.
  Vector initial_point;
  // Project each noised iterate back onto W before anchoring on it (off by
  // default: the anchor is the raw noised point).
  bool project_anchors = false;
  // Hard cap on saddle iterations per phase.
  std::uint64_t max_phase_iterations = std::uint64_t{1} << 22;
};

struct PhaseTrace {
  Vector anchor;
  Vector solution;  // w~_t
  Vector noised;    // w_t
  double gap_upper = 0.0;
  std::uint64_t iterations = 0;
};

struct PhasedResult {
  ParamVector w;  // w_T, possibly outside W
  std::uint64_t draws_used = 0;
  std::vector<PhaseTrace> phases;
};

// Solve one phase objective (anchor w', phase parameters) to alpha_t.
SaddleCertificate solve_phase(const DatasetCollection& data,
                              const PhaseRecord& phase, const LossSpec& loss,
                              const ParamSpace& space,
                              std::span<const double> anchor,
                              std::uint64_t max_iterations = std::uint64_t{1}
                                                             << 22);

PhasedResult run_phased_erm(SampleOracleSet& oracles,
                            const PhasedSchedule& schedule,
                            const LossSpec& loss, const ParamSpace& space,
                            RandomStream& rng,
                            const PhasedOptions& options = {});

}  // namespace wgdp

#endif  // WGDP_PHASED_ERM_HPP_
