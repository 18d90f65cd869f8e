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

// The two-player game solver with on-demand sampling: a private online
// convex optimizer plays w, an EXP3 bandit over groups plays lambda on
// Laplace-privatized, U-shifted losses.

#ifndef WGDP_ONLINE_HPP_
#define WGDP_ONLINE_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "wgdp/mechanisms.hpp"
#include "wgdp/numkit.hpp"
#include "wgdp/problem.hpp"

namespace wgdp {

// ---- DP-OCO contract -----------------------------------------------------------

// A private online convex optimizer over W. Each call to next() consumes one
// loss datum x (the loss l(., x) revealed at the current iterate) and returns
// the next iterate, which must lie in W. Implementations declare their
// guarantee under replacement of one datum in the input stream.
class DpOco {
 public:
  virtual ~DpOco() = default;
  virtual const Vector& current() const = 0;
  virtual Vector next(const DataPoint& x, const LossSpec& loss) = 0;
  virtual PrivacyBudget privacy() const = 0;
};

struct OcoState {
  Vector w1;
  Vector gradient_sum;
  std::vector<Vector> history;  // w_1 .. w_{t+1}
  std::uint64_t steps = 0;      // gradients consumed
  std::uint64_t clip_events = 0;
  double clip_norm = 0.0;       // L; gradients longer than this are scaled

  OcoState(Vector w1, double clip_norm);
};

// w_{t+1} = Proj_W(w_1 - eta (sum_{s<=t} g_s + noise)). `noise` is the tree
// prefix noise for t = steps after this gradient (empty means zero).
Vector dp_ftrl_next(OcoState& state, std::span<const double> gradient,
                    std::span<const double> noise, const ParamSpace& space,
                    double eta);

// Tree-aggregated DP-FTRL.
class DpFtrl final : public DpOco {
 public:
  DpFtrl(ParamSpace space, Vector w1, double eta, double lipschitz,
         TreeNoise noise, PrivacyBudget budget);

  const Vector& current() const override { return state_.history.back(); }
  Vector next(const DataPoint& x, const LossSpec& loss) override;
  PrivacyBudget privacy() const override { return budget_; }

  const OcoState& state() const { return state_; }
  double eta() const { return eta_; }

 private:
  ParamSpace space_;
  OcoState state_;
  double eta_;
  TreeNoise noise_;
  PrivacyBudget budget_;
  Vector grad_;
};

// (2L/eps) sqrt(2 ceil(log2 T) ln(1.25/delta)); zero when eps = inf. The
// level count is taken as at least 1 so a one-step horizon still carries
// noise.
double tree_sigma_node(double lipschitz, std::uint64_t horizon,
                       const PrivacyBudget& budget);

// M / (L sqrt(T)) / (1 + sigma_node sqrt(d) / L)
double default_ftrl_eta(double diameter, double lipschitz,
                        std::uint64_t horizon, double sigma_node,
                        std::size_t dim);

// ---- EXP3 ----------------------------------------------------------------------

inline constexpr double kWeightFloor = 1e-300;

// lambda_i <- lambda_i exp(-eta loss / lambda_i) on i only, then normalize.
// Computed in log space; entries that would fall below kWeightFloor are
// clamped there and counted in *floor_events. DegenerateWeight when
// lambda_i = 0.
GroupWeights exp3_update(const GroupWeights& lambda, std::size_t arm,
                         double loss_estimate, double eta,
                         std::uint64_t* floor_events = nullptr);

// The importance-weighted loss vector: loss / lambda_i at i, zero elsewhere.
Vector importance_weighted_estimate(const GroupWeights& lambda,
                                    std::size_t arm, double loss_estimate);

// Full-information exponential weights: lambda_i <- lambda_i exp(-eta L_i),
// normalized. Same floor rule as exp3_update.
GroupWeights hedge_update(const GroupWeights& lambda,
                          std::span<const double> losses, double eta,
                          std::uint64_t* floor_events = nullptr);

// ---- the game ------------------------------------------------------------------

struct GameConfig {
  std::uint64_t T = 0;       // iterates w_1..w_T; T - 1 rounds
  PrivacyBudget budget;
  double U = 0.0;            // B + (2B/eps) ln T
  double eta_exp3 = 0.0;     // sqrt(ln p / (p T U^2))
  double sigma_node = 0.0;
  double eta_ftrl = 0.0;
  double laplace_scale = 0.0;  // B / eps
};

// T = floor(K/2) + 1 so that 2(T - 1) <= K.
GameConfig make_game_config(std::uint64_t K, std::size_t p, std::size_t dim,
                            const LossSpec& loss, const ParamSpace& space,
                            const PrivacyBudget& budget);

struct GameResult {
  Vector w_bar;
  GroupWeights lambda_bar = GroupWeights::uniform(1);
  std::uint64_t draws_used = 0;
  std::uint64_t rounds = 0;
  // Rounds with |y_t| > (2B/eps) ln T (outside the clipping event).
  std::uint64_t noise_exceedances = 0;
  std::uint64_t floor_events = 0;
  std::uint64_t gradient_clips = 0;
};

// Stream layout: child 0 samples groups, child 1 draws the Laplace noise.
GameResult run_game(SampleOracleSet& oracles, const GameConfig& config,
                    DpOco& oco, const LossSpec& loss, const ParamSpace& space,
                    RandomStream& rng);

// run_game with a DpFtrl player seeded from child stream 2 of `rng`,
// starting at `w1` (empty means the center of W).
GameResult run_oco_game(SampleOracleSet& oracles, const GameConfig& config,
                        const LossSpec& loss, const ParamSpace& space,
                        RandomStream& rng, const Vector& w1 = {});

}  // namespace wgdp

#endif  // WGDP_ONLINE_HPP_
