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

// Differential-privacy primitives and the noise calibrations the solvers use.
//
// epsilon = +infinity is the no-privacy sentinel: every calibration returns
// zero noise, while the samplers still consume their draws so the stream
// positions do not depend on the privacy level.

#ifndef WGDP_MECHANISMS_HPP_
#define WGDP_MECHANISMS_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>

#include "wgdp/numkit.hpp"

namespace wgdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  // Throws InvalidArgument unless epsilon > 0 and delta in (0, 1).
  void validate() const;
  bool is_private() const { return epsilon < kInfinity; }
  static PrivacyBudget non_private() { return {kInfinity, 1e-5}; }
};

struct NoiseScales {
  double gaussian_sigma = 0.0;  // per-coordinate standard deviation
  double laplace_tau = 0.0;     // Laplace scale b
};

// Inverse CDF of Laplace(0, scale) at u in (0, 1).
double laplace_from_uniform(double scale, double u);
// One uniform_open() draw, also when scale = 0 (which returns exactly 0).
double laplace_noise(double scale, RandomStream& rng);
// d standard normals (2 draws each); sigma = 0 returns exact zeros.
Vector gaussian_noise(double sigma, std::size_t dim, RandomStream& rng);

// 6 D sqrt(2 log2(n) ln(1/delta) eta eta_t) / epsilon; 0 when epsilon = inf.
double phased_noise_sigma(double lipschitz_or_range_D, double n, double eta,
                          double eta_t, double epsilon, double delta);

// argmax_i scores_i + Lap(tau), lowest index on ties. Always draws p
// Laplace variates.
std::size_t report_noisy_max(std::span<const double> scores, double tau,
                             RandomStream& rng);

// Per-step budget for T adaptive steps under advanced composition:
//   eps0 = eps / (2 sqrt(2 T ln(2/delta))),  delta0 = delta / (2T).
// Valid (total stays within (eps, delta)) for eps <= 1; see
// advanced_composition_epsilon.
PrivacyBudget calibrate_composed_budget(const PrivacyBudget& total,
                                        std::uint64_t steps);

// Total epsilon of T-fold adaptive composition of eps0-DP steps with slack
// delta_slack: sqrt(2 T ln(1/delta_slack)) eps0 + T eps0 (e^eps0 - 1).
double advanced_composition_epsilon(double eps0, std::uint64_t steps,
                                    double delta_slack);

// Gaussian-mechanism standard deviation for an L2 sensitivity under
// (epsilon, delta): sensitivity * sqrt(2 ln(1.25/delta)) / epsilon.
double gaussian_mechanism_sigma(double sensitivity, double epsilon,
                                double delta);

// Noise for the noisy-SGD solvers over n points per group and T rounds.
// The round budget from calibrate_composed_budget is split evenly between
// the w step (Gaussian) and the loss report (Laplace):
//   eps_r = eps0 / 2
//   tau   = (B / n) / eps_r
//   sigma = gaussian_mechanism_sigma(2 L / n, eps_r, delta0)
// The Gaussian sensitivity 2L/m of a size-m batch mean is scaled by the
// subsampling ratio m/n, so m drops out. With n = K/p this is
//   tau     = 4 sqrt(2) B p sqrt(T ln(2/delta)) / (K eps)
//   sigma^2 = 256 T p^2 L^2 ln(2.5 T/delta) ln(2/delta) / (K^2 eps^2).
NoiseScales noisy_sgd_noise(double n, double lipschitz, double range_bound,
                            const PrivacyBudget& budget, std::uint64_t rounds);

// Binary-tree aggregation noise for private prefix sums over t = 1..T.
// Node (level l, index j) covers steps [(j-1) 2^l + 1, j 2^l]; its noise is
// drawn from a child stream keyed by (l, j), so values do not depend on
// query order. The nodes of the most recent decomposition stay cached
// (O(log T) vectors); re-queries return identical vectors.
class TreeNoise {
 public:
  TreeNoise(std::uint64_t horizon, double sigma_node, std::size_t dim,
            RandomStream base);

  std::uint64_t horizon() const { return horizon_; }
  double sigma_node() const { return sigma_node_; }

  // Sum of node noises over the dyadic decomposition of [1, t].
  Vector prefix(std::uint64_t t);
  // popcount(t)
  static std::size_t nodes_in_prefix(std::uint64_t t);
  // Number of node vectors generated so far (cache misses).
  std::uint64_t nodes_generated() const { return generated_; }

 private:
  using NodeKey = std::pair<unsigned, std::uint64_t>;
  const Vector& node(const NodeKey& key);

  std::uint64_t horizon_;
  double sigma_node_;
  std::size_t dim_;
  RandomStream base_;
  std::map<NodeKey, Vector> cache_;
  std::uint64_t generated_ = 0;
};

}  // namespace wgdp

#endif  // WGDP_MECHANISMS_HPP_
