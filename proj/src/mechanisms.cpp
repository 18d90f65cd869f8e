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

#include "wgdp/mechanisms.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "wgdp/errors.hpp"

namespace wgdp {

void PrivacyBudget::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
}

double laplace_from_uniform(double scale, double u) {
  if (!(scale >= 0.0)) throw InvalidArgument("laplace: negative scale");
  if (scale == 0.0) return 0.0;
  const double c = u - 0.5;
  if (c == 0.0) return 0.0;
  const double mag = -scale * std::log1p(-2.0 * std::abs(c));
  return c < 0.0 ? -mag : mag;
}

double laplace_noise(double scale, RandomStream& rng) {
  if (!(scale >= 0.0)) throw InvalidArgument("laplace: negative scale");
  return laplace_from_uniform(scale, rng.uniform_open());
}

Vector gaussian_noise(double sigma, std::size_t dim, RandomStream& rng) {
  if (!(sigma >= 0.0)) throw InvalidArgument("gaussian: negative sigma");
  Vector out(dim, 0.0);
  for (double& v : out) {
    const double g = rng.standard_normal();
    if (sigma != 0.0) v = sigma * g;
  }
  return out;
}

double phased_noise_sigma(double big_d, double n, double eta, double eta_t,
                          double epsilon, double delta) {
  if (!(n >= 2.0)) {
    throw InvalidArgument("phased_noise_sigma: n must be >= 2");
  }
  if (!(big_d > 0.0) || !(eta > 0.0) || !(eta_t > 0.0) ||
      !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("phased_noise_sigma: non-positive input");
  }
  if (epsilon == kInfinity) return 0.0;
  return 6.0 * big_d *
         std::sqrt(2.0 * std::log2(n) * std::log(1.0 / delta) * eta * eta_t) /
         epsilon;
}

std::size_t report_noisy_max(std::span<const double> scores, double tau,
                             RandomStream& rng) {
  if (scores.empty()) throw InvalidArgument("report_noisy_max: no scores");
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double v = scores[i] + laplace_noise(tau, rng);
    if (i == 0 || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

PrivacyBudget calibrate_composed_budget(const PrivacyBudget& total,
                                        std::uint64_t steps) {
  if (steps < 1) throw InvalidArgument("calibrate_composed_budget: T < 1");
  total.validate();
  const double t = static_cast<double>(steps);
  const double eps0 =
      total.epsilon / (2.0 * std::sqrt(2.0 * t * std::log(2.0 / total.delta)));
  return {eps0, total.delta / (2.0 * t)};
}

double advanced_composition_epsilon(double eps0, std::uint64_t steps,
                                    double delta_slack) {
  const double t = static_cast<double>(steps);
  return std::sqrt(2.0 * t * std::log(1.0 / delta_slack)) * eps0 +
         t * eps0 * std::expm1(eps0);
}

double gaussian_mechanism_sigma(double sensitivity, double epsilon,
                                double delta) {
  if (!(sensitivity >= 0.0) || !(epsilon > 0.0) ||
      !(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("gaussian_mechanism_sigma: bad input");
  }
  if (epsilon == kInfinity) return 0.0;
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

NoiseScales noisy_sgd_noise(double n, double lipschitz, double range_bound,
                            const PrivacyBudget& budget,
                            std::uint64_t rounds) {
  if (!(n >= 1.0)) throw InvalidArgument("noisy_sgd_noise: n < 1");
  budget.validate();
  if (!budget.is_private()) return {};
  const PrivacyBudget step = calibrate_composed_budget(budget, rounds);
  const double eps_round = 0.5 * step.epsilon;
  NoiseScales s;
  s.laplace_tau = (range_bound / n) / eps_round;
  s.gaussian_sigma =
      gaussian_mechanism_sigma(2.0 * lipschitz / n, eps_round, step.delta);
  return s;
}

// ---- TreeNoise ----------------------------------------------------------------

TreeNoise::TreeNoise(std::uint64_t horizon, double sigma_node, std::size_t dim,
                     RandomStream base)
    : horizon_(horizon),
      sigma_node_(sigma_node),
      dim_(dim),
      base_(std::move(base)) {
  if (horizon_ < 1) throw InvalidArgument("TreeNoise: horizon must be >= 1");
  if (!(sigma_node_ >= 0.0)) {
    throw InvalidArgument("TreeNoise: negative sigma");
  }
}

std::size_t TreeNoise::nodes_in_prefix(std::uint64_t t) {
  return static_cast<std::size_t>(std::popcount(t));
}

const Vector& TreeNoise::node(const NodeKey& key) {
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  RandomStream rng =
      base_.child((static_cast<std::uint64_t>(key.first) << 48) ^ key.second);
  ++generated_;
  return cache_.emplace(key, gaussian_noise(sigma_node_, dim_, rng))
      .first->second;
}

Vector TreeNoise::prefix(std::uint64_t t) {
  if (t < 1 || t > horizon_) {
    throw InvalidArgument("TreeNoise::prefix: t = " + std::to_string(t) +
                          " outside [1, " + std::to_string(horizon_) + "]");
  }
  Vector out(dim_, 0.0);
  if (sigma_node_ == 0.0) return out;
  // Blocks from the largest level down: bit l of t set contributes the node
  // at level l ending at (t with bits below l cleared).
  std::map<NodeKey, Vector> keep;
  for (int level = 63; level >= 0; --level) {
    const std::uint64_t bit = std::uint64_t{1} << level;
    if ((t & bit) == 0) continue;
    const std::uint64_t end = t & ~(bit - 1);
    const NodeKey key{static_cast<unsigned>(level), end >> level};
    const Vector& v = node(key);
    for (std::size_t k = 0; k < dim_; ++k) out[k] += v[k];
    keep.emplace(key, v);
  }
  cache_.swap(keep);
  return out;
}

}  // namespace wgdp
