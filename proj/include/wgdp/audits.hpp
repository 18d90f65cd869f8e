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


// Invariant audits: stability of the regularized saddle solution, noise
// calibration, Hedge/EXP3 regret and the worst-group reduction identity.
// Failures are report content, never exceptions.

#ifndef WGDP_AUDITS_HPP_
#define WGDP_AUDITS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wgdp/numkit.hpp"

namespace wgdp {

struct AuditCheck {
  std::string name;
  double measured = 0.0;
  double limit = 0.0;
  bool passed = false;
  // Informational lines are printed but never fail the report.
  bool informational = false;
};

struct AuditReport {
  std::string kind;
  std::vector<AuditCheck> checks;
  std::vector<std::string> notes;

  bool passed() const;
  std::size_t violations() const;
  // min over gating checks of (limit - measured) / |limit|; negative means
  // a violation. Zero limits use the absolute difference.
  double worst_margin() const;
};

std::string format_report(const AuditReport& report);

struct StabilityAuditOptions {
  std::size_t trials = 100;
  std::size_t n = 64;
  std::size_t groups = 3;
  std::size_t dim = 5;
  double mu_w = 5.0;
  double mu_lambda = 0.625;
  std::uint64_t seed = 1;
};
AuditReport audit_stability(const StabilityAuditOptions& options);

struct MechanismAuditOptions {
  std::size_t draws = 1000000;
  double laplace_scale = 1.0;
  double gaussian_sigma = 2.0;
  double tree_sigma = 1.0;
  std::size_t tree_replays = 20000;
  std::size_t tree_dim = 8;
  std::vector<std::uint64_t> prefixes{1, 3, 7};
  double relative_tolerance = 0.05;
  // Run every sampler at scale 0 and require exact zeros instead.
  bool zero_scales = false;
  std::uint64_t seed = 1;
};
AuditReport audit_mechanisms(const MechanismAuditOptions& options);

struct RegretAuditOptions {
  std::vector<std::uint64_t> horizons{100, 1000};
  std::vector<std::size_t> groups{2, 8};
  double U = 1.0;           // losses lie in [0, 2U]
  std::size_t replays = 20;  // EXP3 regret is averaged over replays
  std::size_t ftrl_steps = 500;
  std::uint64_t seed = 1;
};

// Oblivious loss sequences in [0, 2U]^p used by the regret audit.
std::vector<std::string> regret_families();
std::vector<Vector> regret_sequence(const std::string& family,
                                    std::uint64_t T, std::size_t p, double U,
                                    RandomStream& rng);

// sum_t <lambda_t, l_t> - min_i sum_t l_{t,i}; Hedge with
// eta = sqrt(ln p / (U^2 T)).
double hedge_regret(const std::vector<Vector>& losses, double U);
// Same pseudo-regret for one EXP3 run with eta = sqrt(ln p / (p T U^2)).
double exp3_regret(const std::vector<Vector>& losses, double U,
                   RandomStream& rng);

AuditReport audit_regret(const RegretAuditOptions& options);

struct ReductionAuditOptions {
  std::size_t grid_points = 101;
  std::size_t groups = 3;
  std::size_t n = 16;
  std::uint64_t seed = 1;
};
AuditReport audit_reduction(const ReductionAuditOptions& options);

// kind: stability | mechanisms | regret | reduction. `trials` sets the
// stability trial count (0 keeps the default).
AuditReport run_audit(const std::string& kind, std::size_t trials,
                      std::uint64_t seed, bool zero_scales = false);

}  // namespace wgdp

#endif  // WGDP_AUDITS_HPP_
