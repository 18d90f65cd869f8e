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

#include "wgdp/online.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "wgdp/errors.hpp"

namespace wgdp {
namespace {

GroupWeights normalize_log_weights(Vector log_w,
                                   std::uint64_t* floor_events) {
  const double lse = log_sum_exp(log_w);
  std::uint64_t floored = 0;
  for (double& v : log_w) {
    v = std::exp(v - lse);
    if (!(v >= kWeightFloor)) {
      v = kWeightFloor;
      ++floored;
    }
  }
  if (floor_events != nullptr) *floor_events += floored;
  if (floored == 0) return GroupWeights(std::move(log_w));
  return GroupWeights::normalized(std::move(log_w));
}

}  // namespace

// ---- DP-FTRL ---------------------------------------------------------------------

OcoState::OcoState(Vector w1_in, double clip)
    : w1(std::move(w1_in)), gradient_sum(w1.size(), 0.0), clip_norm(clip) {
  history.push_back(w1);
}

Vector dp_ftrl_next(OcoState& state, std::span<const double> gradient,
                    std::span<const double> noise, const ParamSpace& space,
                    double eta) {
  const std::size_t d = state.w1.size();
  if (gradient.size() != d || (!noise.empty() && noise.size() != d)) {
    throw InvalidArgument("dp_ftrl_next: dimension mismatch");
  }
  const double g_norm = norm2(gradient);
  double scale = 1.0;
  if (state.clip_norm > 0.0 && g_norm > state.clip_norm) {
    scale = state.clip_norm / g_norm;
    ++state.clip_events;
  }
  for (std::size_t k = 0; k < d; ++k) {
    state.gradient_sum[k] += scale == 1.0 ? gradient[k] : scale * gradient[k];
  }
  ++state.steps;
  Vector target(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double total =
        noise.empty() ? state.gradient_sum[k] : state.gradient_sum[k] + noise[k];
    target[k] = state.w1[k] - eta * total;
  }
  Vector next = space.project(target);
  state.history.push_back(next);
  return next;
}

DpFtrl::DpFtrl(ParamSpace space, Vector w1, double eta, double lipschitz,
               TreeNoise noise, PrivacyBudget budget)
    : space_(std::move(space)),
      state_(std::move(w1), lipschitz),
      eta_(eta),
      noise_(std::move(noise)),
      budget_(budget),
      grad_(space_.dim()) {
  if (state_.w1.size() != space_.dim()) {
    throw InvalidArgument("DpFtrl: w1 dimension mismatch");
  }
  if (!space_.contains(state_.w1)) {
    throw InvalidArgument("DpFtrl: w1 outside W");
  }
  if (!(eta_ > 0.0)) throw InvalidArgument("DpFtrl: eta must be > 0");
}

Vector DpFtrl::next(const DataPoint& x, const LossSpec& loss) {
  loss.gradient(current(), x, grad_);
  const Vector noise = noise_.prefix(state_.steps + 1);
  return dp_ftrl_next(state_, grad_, noise, space_, eta_);
}

double tree_sigma_node(double lipschitz, std::uint64_t horizon,
                       const PrivacyBudget& budget) {
  budget.validate();
  if (horizon < 1) throw InvalidArgument("tree_sigma_node: horizon < 1");
  if (!budget.is_private()) return 0.0;
  const double levels = std::max<double>(
      1.0, static_cast<double>(std::bit_width(horizon - 1)));
  return (2.0 * lipschitz / budget.epsilon) *
         std::sqrt(2.0 * levels * std::log(1.25 / budget.delta));
}

double default_ftrl_eta(double diameter, double lipschitz,
                        std::uint64_t horizon, double sigma_node,
                        std::size_t dim) {
  const double base =
      diameter / (lipschitz * std::sqrt(static_cast<double>(horizon)));
  return base /
         (1.0 + sigma_node * std::sqrt(static_cast<double>(dim)) / lipschitz);
}

// ---- EXP3 / Hedge ----------------------------------------------------------------

GroupWeights exp3_update(const GroupWeights& lambda, std::size_t arm,
                         double loss_estimate, double eta,
                         std::uint64_t* floor_events) {
  if (arm >= lambda.size()) throw InvalidArgument("exp3_update: bad arm");
  const double weight = lambda[arm];
  if (weight <= 0.0) {
    throw DegenerateWeight("exp3_update: arm " + std::to_string(arm) +
                           " has zero probability");
  }
  if (loss_estimate == 0.0 || eta == 0.0) return lambda;
  Vector log_w(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    log_w[i] = std::log(lambda[i]);
  }
  log_w[arm] -= eta * loss_estimate / weight;
  return normalize_log_weights(std::move(log_w), floor_events);
}

Vector importance_weighted_estimate(const GroupWeights& lambda,
                                    std::size_t arm, double loss_estimate) {
  if (arm >= lambda.size()) {
    throw InvalidArgument("importance_weighted_estimate: bad arm");
  }
  if (lambda[arm] <= 0.0) {
    throw DegenerateWeight("importance_weighted_estimate: zero weight");
  }
  Vector out(lambda.size(), 0.0);
  out[arm] = loss_estimate / lambda[arm];
  return out;
}

GroupWeights hedge_update(const GroupWeights& lambda,
                          std::span<const double> losses, double eta,
                          std::uint64_t* floor_events) {
  if (losses.size() != lambda.size()) {
    throw InvalidArgument("hedge_update: size mismatch");
  }
  if (eta == 0.0) return lambda;
  Vector log_w(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    log_w[i] = std::log(lambda[i]) - eta * losses[i];
  }
  return normalize_log_weights(std::move(log_w), floor_events);
}

// ---- the game ------------------------------------------------------------------

GameConfig make_game_config(std::uint64_t K, std::size_t p, std::size_t dim,
                            const LossSpec& loss, const ParamSpace& space,
                            const PrivacyBudget& budget) {
  budget.validate();
  if (K < 2) throw InstanceTooSmall("make_game_config: need K >= 2");
  if (p == 0) throw InvalidArgument("make_game_config: p = 0");
  GameConfig c;
  c.T = K / 2 + 1;
  c.budget = budget;
  const double b = loss.range_bound();
  const double t = static_cast<double>(c.T);
  c.laplace_scale = budget.is_private() ? b / budget.epsilon : 0.0;
  c.U = b + 2.0 * c.laplace_scale * std::log(t);
  c.eta_exp3 = std::sqrt(std::log(static_cast<double>(p)) /
                         (static_cast<double>(p) * t * c.U * c.U));
  c.sigma_node = tree_sigma_node(loss.lipschitz(), c.T - 1, budget);
  c.eta_ftrl = default_ftrl_eta(space.diameter(), loss.lipschitz(), c.T - 1,
                                c.sigma_node, dim);
  return c;
}

GameResult run_game(SampleOracleSet& oracles, const GameConfig& config,
                    DpOco& oco, const LossSpec& loss, const ParamSpace& space,
                    RandomStream& rng) {
  if (config.T < 2) throw InvalidArgument("run_game: T must be >= 2");
  const std::uint64_t rounds = config.T - 1;
  if (oracles.remaining() < 2 * rounds) {
    throw BudgetExhausted("run_game: oracle budget below 2(T - 1)");
  }
  const std::size_t p = oracles.groups();
  const std::size_t d = space.dim();
  RandomStream group_rng = rng.child(0);
  RandomStream laplace_rng = rng.child(1);
  const double threshold =
      2.0 * config.laplace_scale * std::log(static_cast<double>(config.T));

  GameResult out;
  const std::uint64_t start = oracles.draws_used();
  GroupWeights lambda = GroupWeights::uniform(p);
  Vector sum_w(d, 0.0);
  Vector sum_lambda(p, 0.0);
  auto accumulate = [&]() {
    const Vector& w = oco.current();
    for (std::size_t k = 0; k < d; ++k) sum_w[k] += w[k];
    for (std::size_t i = 0; i < p; ++i) sum_lambda[i] += lambda[i];
  };
  for (std::uint64_t t = 1; t <= rounds; ++t) {
    accumulate();
    const std::size_t arm = sample_categorical(lambda, group_rng);
    const DataPoint x_minus = oracles.draw(arm);
    const DataPoint x_plus = oracles.draw(arm);
    const double observed = loss.evaluate(oco.current(), x_plus);
    oco.next(x_minus, loss);
    const double y = laplace_noise(config.laplace_scale, laplace_rng);
    if (std::abs(y) > threshold) ++out.noise_exceedances;
    const double estimate = config.U - observed + y;
    lambda = exp3_update(lambda, arm, estimate, config.eta_exp3,
                         &out.floor_events);
  }
  accumulate();
  const double inv = 1.0 / static_cast<double>(config.T);
  out.w_bar = sum_w;
  for (double& v : out.w_bar) v *= inv;
  out.w_bar = space.project(out.w_bar);
  out.lambda_bar = GroupWeights::normalized(sum_lambda);
  out.rounds = rounds;
  out.draws_used = oracles.draws_used() - start;
  if (const auto* ftrl = dynamic_cast<const DpFtrl*>(&oco)) {
    out.gradient_clips = ftrl->state().clip_events;
  }
  return out;
}

GameResult run_oco_game(SampleOracleSet& oracles, const GameConfig& config,
                        const LossSpec& loss, const ParamSpace& space,
                        RandomStream& rng, const Vector& w1) {
  const std::uint64_t horizon = std::max<std::uint64_t>(1, config.T - 1);
  DpFtrl player(space, w1.empty() ? space.center() : w1, config.eta_ftrl,
                loss.lipschitz(),
                TreeNoise(horizon, config.sigma_node, space.dim(),
                          rng.child(2)),
                config.budget);
  return run_game(oracles, config, player, loss, space, rng);
}

}  // namespace wgdp
