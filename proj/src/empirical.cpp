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

#include "wgdp/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "wgdp/errors.hpp"
#include "wgdp/online.hpp"

namespace wgdp {
namespace {

struct Common {
  std::size_t n = 0;
  std::size_t m = 1;
  NoiseScales noise;
};

Common common_params(std::uint64_t K, std::size_t p, double lipschitz,
                     double range_bound, double epsilon, double delta,
                     std::uint64_t rounds) {
  if (p == 0) throw InvalidArgument("noisy SGD: p = 0");
  Common c;
  c.n = static_cast<std::size_t>(K / p);
  if (c.n < 1) throw InstanceTooSmall("noisy SGD: need K >= p");
  c.m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(c.n))));
  c.noise = noisy_sgd_noise(static_cast<double>(c.n), lipschitz, range_bound,
                            {epsilon, delta}, rounds);
  return c;
}

std::uint64_t clamp_rounds(double raw, bool& capped) {
  capped = false;
  if (!(raw >= 1.0)) {
    capped = true;
    return 1;
  }
  if (raw > static_cast<double>(kMaxRounds)) {
    capped = true;
    return kMaxRounds;
  }
  return static_cast<std::uint64_t>(std::floor(raw));
}

double step_size(double diameter, double lipschitz, std::size_t dim,
                 double sigma, std::uint64_t rounds) {
  const double t = static_cast<double>(rounds);
  return diameter / std::sqrt(t * (lipschitz * lipschitz +
                                   static_cast<double>(dim) * sigma * sigma));
}

void check_run(const DatasetCollection& data, std::size_t m,
               std::uint64_t rounds, const ParamSpace& space) {
  if (m < 1 || m > data.per_group()) {
    throw InvalidArgument("minibatch size m must lie in [1, n]");
  }
  if (rounds < 1) throw InvalidArgument("T must be >= 1");
  if (space.dim() != data.dim()) {
    throw InvalidArgument("dataset and W dimensions differ");
  }
}

Vector initial_point(const Vector& requested, const ParamSpace& space) {
  Vector w = requested.empty() ? space.center() : requested;
  if (!space.contains(w)) throw InvalidArgument("initial point outside W");
  return w;
}

void noisy_step(Vector& w, const Vector& grad, const Vector& noise,
                double eta, const ParamSpace& space) {
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] -= eta * (grad[k] + noise[k]);
  }
  w = space.project(w);
}

}  // namespace

MgrConfig mgr_params_for_rounds(std::uint64_t K, std::size_t p,
                                std::size_t dim, double diameter,
                                double lipschitz, double range_bound,
                                double epsilon, double delta,
                                std::uint64_t rounds,
                                const RateMultipliers& multipliers) {
  if (rounds < 1) throw InvalidArgument("mgr: T must be >= 1");
  const Common c = common_params(K, p, lipschitz, range_bound, epsilon, delta,
                                 rounds);
  MgrConfig cfg;
  cfg.m = c.m;
  cfg.T = rounds;
  cfg.sigma = c.noise.gaussian_sigma;
  cfg.tau = c.noise.laplace_tau;
  cfg.eta_w = multipliers.eta_w *
              step_size(diameter, lipschitz, dim, cfg.sigma, rounds);
  const double t = static_cast<double>(rounds);
  cfg.U = range_bound + cfg.tau * std::log(static_cast<double>(K) * t);
  cfg.eta_lambda = multipliers.eta_lambda *
                   std::sqrt(std::log(static_cast<double>(p)) /
                             (cfg.U * cfg.U * t));
  return cfg;
}

MgrConfig mgr_default_params(std::uint64_t K, std::size_t p, std::size_t dim,
                             double diameter, double lipschitz,
                             double range_bound, double epsilon, double delta,
                             const RateMultipliers& multipliers) {
  if (dim == 0 || !(diameter > 0.0) || !(lipschitz > 0.0) ||
      !(range_bound > 0.0)) {
    throw InvalidArgument("mgr_default_params: inputs must be positive");
  }
  PrivacyBudget{epsilon, delta}.validate();
  const double kd = static_cast<double>(K);
  const double pd = static_cast<double>(p);
  const double raw =
      multipliers.rounds *
      (diameter * lipschitz + range_bound * std::sqrt(std::log(pd))) * kd *
      kd * epsilon * epsilon /
      (lipschitz * range_bound * static_cast<double>(dim) * pd * pd *
       std::log(1.0 / delta));
  bool capped = false;
  const std::uint64_t rounds = clamp_rounds(raw, capped);
  MgrConfig cfg = mgr_params_for_rounds(K, p, dim, diameter, lipschitz,
                                        range_bound, epsilon, delta, rounds,
                                        multipliers);
  cfg.rounds_capped = capped;
  return cfg;
}

AgsConfig ags_params_for_rounds(std::uint64_t K, std::size_t p,
                                std::size_t dim, double diameter,
                                double lipschitz, double range_bound,
                                double epsilon, double delta,
                                std::uint64_t rounds, double kappa) {
  if (rounds < 1) throw InvalidArgument("ags: T must be >= 1");
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw InvalidArgument("ags: kappa must lie in (0, 1)");
  }
  const Common c = common_params(K, p, lipschitz, range_bound, epsilon, delta,
                                 rounds);
  AgsConfig cfg;
  cfg.m = c.m;
  cfg.T = rounds;
  cfg.sigma = c.noise.gaussian_sigma;
  cfg.tau = c.noise.laplace_tau;
  cfg.kappa = kappa;
  cfg.eta = step_size(diameter, lipschitz, dim, cfg.sigma, rounds);
  return cfg;
}

AgsConfig ags_default_params(std::uint64_t K, std::size_t p, std::size_t dim,
                             double diameter, double lipschitz,
                             double range_bound, double epsilon, double delta,
                             double kappa) {
  if (dim == 0 || !(diameter > 0.0) || !(lipschitz > 0.0) ||
      !(range_bound > 0.0)) {
    throw InvalidArgument("ags_default_params: inputs must be positive");
  }
  PrivacyBudget{epsilon, delta}.validate();
  const double raw = diameter * lipschitz * static_cast<double>(K) * epsilon /
                     (16.0 * range_bound * static_cast<double>(p) *
                      std::sqrt(std::log(1.0 / delta)));
  bool capped = false;
  const std::uint64_t rounds = clamp_rounds(raw, capped);
  AgsConfig cfg = ags_params_for_rounds(K, p, dim, diameter, lipschitz,
                                        range_bound, epsilon, delta, rounds,
                                        kappa);
  cfg.rounds_capped = capped;
  return cfg;
}

std::vector<std::size_t> sample_batch(std::size_t n, std::size_t m,
                                      RandomStream& rng) {
  if (n == 0) throw InvalidArgument("sample_batch: empty dataset");
  std::vector<std::size_t> idx(m);
  const double nd = static_cast<double>(n);
  for (std::size_t& j : idx) {
    j = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * nd));
  }
  return idx;
}

Vector minibatch_gradient(const Dataset& data, std::span<const double> w,
                          std::size_t m, const LossSpec& loss,
                          RandomStream& rng) {
  const std::vector<std::size_t> idx = sample_batch(data.size(), m, rng);
  Vector grad(data.dim());
  loss.batch_indexed(data, idx, w, grad);
  return grad;
}

MgrResult run_mgr(const DatasetCollection& data, const MgrConfig& config,
                  const LossSpec& loss, const ParamSpace& space,
                  RandomStream& rng) {
  check_run(data, config.m, config.T, space);
  const std::size_t p = data.groups();
  const std::size_t d = data.dim();
  RandomStream select_rng = rng.child(0);
  RandomStream batch_rng = rng.child(1);
  RandomStream gauss_rng = rng.child(2);
  RandomStream laplace_rng = rng.child(3);
  const GroupRisks risks(data, loss);

  MgrResult out;
  out.selections.assign(p, 0);
  Vector w = initial_point(config.initial_point, space);
  GroupWeights lambda = GroupWeights::uniform(p);
  Vector sum_w(d, 0.0);
  Vector sum_lambda(p, 0.0);
  Vector r(p);
  Vector noisy_losses(p);
  auto accumulate = [&]() {
    for (std::size_t k = 0; k < d; ++k) sum_w[k] += w[k];
    for (std::size_t i = 0; i < p; ++i) sum_lambda[i] += lambda[i];
  };
  for (std::uint64_t t = 1; t < config.T; ++t) {
    accumulate();
    const std::size_t arm = sample_categorical(lambda, select_rng);
    ++out.selections[arm];
    risks.values(w, r);
    const Vector grad =
        minibatch_gradient(data[arm], w, config.m, loss, batch_rng);
    const Vector g_noise = gaussian_noise(config.sigma, d, gauss_rng);
    noisy_step(w, grad, g_noise, config.eta_w, space);
    for (std::size_t i = 0; i < p; ++i) {
      noisy_losses[i] = -r[i] + laplace_noise(config.tau, laplace_rng);
    }
    lambda = hedge_update(lambda, noisy_losses, config.eta_lambda,
                          &out.floor_events);
    double total = 0.0;
    for (double v : lambda.values()) total += v;
    out.max_simplex_error = std::max(out.max_simplex_error,
                                     std::abs(total - 1.0));
  }
  accumulate();
  const double inv = 1.0 / static_cast<double>(config.T);
  out.w_bar = sum_w;
  for (double& v : out.w_bar) v *= inv;
  out.w_bar = space.project(out.w_bar);
  out.lambda_bar = GroupWeights::normalized(sum_lambda);
  out.rounds = config.T - 1;
  return out;
}

AgsResult run_ags(const DatasetCollection& data, const AgsConfig& config,
                  const LossSpec& loss, const ParamSpace& space,
                  RandomStream& rng) {
  check_run(data, config.m, config.T, space);
  const std::size_t p = data.groups();
  const std::size_t d = data.dim();
  RandomStream select_rng = rng.child(0);
  RandomStream batch_rng = rng.child(1);
  RandomStream gauss_rng = rng.child(2);
  const GroupRisks risks(data, loss);

  AgsResult out;
  out.selections.assign(p, 0);
  Vector w = initial_point(config.initial_point, space);
  Vector sum_w(d, 0.0);
  Vector r(p);
  for (std::uint64_t t = 1; t < config.T; ++t) {
    for (std::size_t k = 0; k < d; ++k) sum_w[k] += w[k];
    risks.values(w, r);
    const std::size_t arm = report_noisy_max(r, config.tau, select_rng);
    ++out.selections[arm];
    const Vector grad =
        minibatch_gradient(data[arm], w, config.m, loss, batch_rng);
    const Vector g_noise = gaussian_noise(config.sigma, d, gauss_rng);
    noisy_step(w, grad, g_noise, config.eta, space);
  }
  for (std::size_t k = 0; k < d; ++k) sum_w[k] += w[k];
  const double inv = 1.0 / static_cast<double>(config.T);
  out.w_bar = sum_w;
  for (double& v : out.w_bar) v *= inv;
  out.w_bar = space.project(out.w_bar);
  out.rounds = config.T - 1;
  return out;
}

}  // namespace wgdp
