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

// Offline solvers over fixed datasets: noisy minibatch SGD for w, with the
// group chosen either by multiplicative reweighting (MGR, Hedge on
// Laplace-noised negated risks) or by report-noisy-max (AGS).
//
// Stream layout shared by both solvers, so that they replay the same w
// trajectory when they pick the same groups:
//   child 0  group selection      child 1  minibatch indices
//   child 2  Gaussian step noise  child 3  Laplace loss noise (MGR)

#ifndef WGDP_EMPIRICAL_HPP_
#define WGDP_EMPIRICAL_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wgdp/mechanisms.hpp"
#include "wgdp/numkit.hpp"
#include "wgdp/problem.hpp"

namespace wgdp {

inline constexpr std::uint64_t kMaxRounds = 1000000;

// Multipliers on the pinned O(.) constants (all 1 by default).
struct RateMultipliers {
  double rounds = 1.0;
  double eta_w = 1.0;
  double eta_lambda = 1.0;
};

struct MgrConfig {
  std::size_t m = 1;          // minibatch size
  std::uint64_t T = 1;        // iterates w_1..w_T
  double eta_w = 0.0;
  double eta_lambda = 0.0;
  double sigma = 0.0;         // Gaussian standard deviation (sigma^2 is the
                              // variance in the calibration formulas)
  double tau = 0.0;           // Laplace scale
  double U = 0.0;
  bool rounds_capped = false;  // T was clamped to [1, kMaxRounds]
  Vector initial_point;        // empty means the center of W
};

struct AgsConfig {
  std::size_t m = 1;
  std::uint64_t T = 1;
  double eta = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double kappa = 0.05;
  bool rounds_capped = false;
  Vector initial_point;
};

// T     = (M L + B sqrt(ln p)) K^2 eps^2 / (G B d p^2 ln(1/delta)), G = L
// sigma, tau from noisy_sgd_noise with n = floor(K/p)
// eta_w = M / sqrt(T (G^2 + d sigma^2))
// U     = B + tau ln(K T),  eta_lambda = sqrt(ln p / (U^2 T))
// m     = floor(sqrt(n))
// T is rounded down and clamped to [1, kMaxRounds]; eps = inf gives
// T = kMaxRounds with rounds_capped set.
MgrConfig mgr_default_params(std::uint64_t K, std::size_t p, std::size_t dim,
                             double diameter, double lipschitz,
                             double range_bound, double epsilon, double delta,
                             const RateMultipliers& multipliers = {});

// Recomputes the T-dependent fields (noise, step sizes, U) of a config
// after T is overridden.
MgrConfig mgr_params_for_rounds(std::uint64_t K, std::size_t p,
                                std::size_t dim, double diameter,
                                double lipschitz, double range_bound,
                                double epsilon, double delta,
                                std::uint64_t rounds,
                                const RateMultipliers& multipliers = {});

// T   = M L K eps / (16 B p sqrt(ln(1/delta)))
// eta = M / sqrt(T (G^2 + d sigma^2)), noise as for MGR.
AgsConfig ags_default_params(std::uint64_t K, std::size_t p, std::size_t dim,
                             double diameter, double lipschitz,
                             double range_bound, double epsilon, double delta,
                             double kappa = 0.05);

AgsConfig ags_params_for_rounds(std::uint64_t K, std::size_t p,
                                std::size_t dim, double diameter,
                                double lipschitz, double range_bound,
                                double epsilon, double delta,
                                std::uint64_t rounds, double kappa = 0.05);

// m indices drawn uniformly with replacement (one uniform draw each).
std::vector<std::size_t> sample_batch(std::size_t n, std::size_t m,
                                      RandomStream& rng);

// Mean gradient over a uniform-with-replacement minibatch of `data`.
Vector minibatch_gradient(const Dataset& data, std::span<const double> w,
                          std::size_t m, const LossSpec& loss,
                          RandomStream& rng);

struct MgrResult {
  Vector w_bar;
  GroupWeights lambda_bar = GroupWeights::uniform(1);
  std::uint64_t rounds = 0;
  std::uint64_t floor_events = 0;
  std::vector<std::size_t> selections;  // rounds per group
  // Largest |sum_i lambda_i - 1| observed after a normalization.
  double max_simplex_error = 0.0;
};

MgrResult run_mgr(const DatasetCollection& data, const MgrConfig& config,
                  const LossSpec& loss, const ParamSpace& space,
                  RandomStream& rng);

struct AgsResult {
  Vector w_bar;
  std::uint64_t rounds = 0;
  std::vector<std::size_t> selections;
};

AgsResult run_ags(const DatasetCollection& data, const AgsConfig& config,
                  const LossSpec& loss, const ParamSpace& space,
                  RandomStream& rng);

}  // namespace wgdp

#endif  // WGDP_EMPIRICAL_HPP_
