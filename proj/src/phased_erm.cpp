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

#include "wgdp/phased_erm.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "wgdp/errors.hpp"

namespace wgdp {

std::uint64_t PhasedSchedule::total_draws() const {
  std::uint64_t total = 0;
  for (const PhaseRecord& ph : phases) total += ph.n_t;
  return total * p;
}

PhasedSchedule make_schedule(std::uint64_t K, std::size_t p, double eta,
                             double lipschitz, double range_bound,
                             double big_d, double epsilon, double delta) {
  if (p == 0) throw InvalidArgument("make_schedule: p = 0");
  if (K < 4 * static_cast<std::uint64_t>(p)) {
    throw InstanceTooSmall("make_schedule: need K >= 4p (K = " +
                           std::to_string(K) + ", p = " + std::to_string(p) +
                           ")");
  }
  if (!(eta > 0.0) || !(lipschitz > 0.0) || !(range_bound > 0.0) ||
      !(big_d > 0.0)) {
    throw InvalidArgument("make_schedule: parameters must be > 0");
  }
  PhasedSchedule s;
  s.K = K;
  s.p = p;
  s.n = static_cast<std::size_t>(K / p);
  s.T = static_cast<std::size_t>(std::bit_width(s.n) - 1);
  s.eta = eta;
  s.lipschitz = lipschitz;
  s.range_bound = range_bound;
  s.big_d = big_d;
  s.budget = {epsilon, delta};
  s.budget.validate();
  const std::size_t n_t = s.n / s.T;
  const double n_td = static_cast<double>(n_t);
  const double mu_lambda = 1.0 / (eta * static_cast<double>(s.n));
  for (std::size_t t = 1; t <= s.T; ++t) {
    PhaseRecord ph;
    ph.t = t;
    ph.n_t = n_t;
    ph.eta_t = std::ldexp(eta, -static_cast<int>(t));
    ph.mu_w = 1.0 / (ph.eta_t * n_td);
    ph.mu_lambda = mu_lambda;
    ph.alpha = stability_alpha(lipschitz, range_bound, n_td, ph.mu_w,
                               ph.mu_lambda);
    ph.sigma = phased_noise_sigma(big_d, static_cast<double>(s.n), eta,
                                  ph.eta_t, epsilon, delta);
    s.phases.push_back(ph);
  }
  return s;
}

double default_eta(double diameter, double big_d, std::uint64_t K,
                   std::size_t p, double epsilon, double delta,
                   std::size_t dim) {
  if (!(diameter > 0.0) || !(big_d > 0.0) || p == 0 || dim == 0 ||
      !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("default_eta: inputs must be positive");
  }
  if (K <= p) throw InvalidArgument("default_eta: need K > p");
  const double kd = static_cast<double>(K);
  const double pd = static_cast<double>(p);
  const double privacy_branch =
      epsilon / std::sqrt(72.0 * static_cast<double>(dim) *
                          std::log(kd / pd) * std::log(1.0 / delta));
  const double statistical_branch =
      std::sqrt(pd) / (std::pow(std::log(kd), 0.75) * std::sqrt(kd));
  return (diameter / big_d) * std::min(privacy_branch, statistical_branch);
}

double phase_sensitivity_bound(const PhasedSchedule& schedule,
                               std::size_t phase) {
  if (phase < 1 || phase > schedule.T) {
    throw InvalidArgument("phase_sensitivity_bound: phase out of range");
  }
  const PhaseRecord& ph = schedule.phases[phase - 1];
  return 6.0 * schedule.big_d *
         std::sqrt(std::log2(static_cast<double>(schedule.n)) * ph.eta_t *
                   schedule.eta);
}

SaddleCertificate solve_phase(const DatasetCollection& data,
                              const PhaseRecord& phase, const LossSpec& loss,
                              const ParamSpace& space,
                              std::span<const double> anchor,
                              std::uint64_t max_iterations) {
  RegularizedObjective obj(data, loss, space, phase.mu_w, phase.mu_lambda,
                           Vector(anchor.begin(), anchor.end()));
  return solve_to_alpha(obj, phase.alpha, {}, max_iterations);
}

PhasedResult run_phased_erm(SampleOracleSet& oracles,
                            const PhasedSchedule& schedule,
                            const LossSpec& loss, const ParamSpace& space,
                            RandomStream& rng, const PhasedOptions& options) {
  if (oracles.groups() != schedule.p) {
    throw InvalidArgument("run_phased_erm: schedule built for another p");
  }
  if (oracles.remaining() < schedule.total_draws()) {
    throw BudgetExhausted("run_phased_erm: oracle budget below p * sum n_t");
  }
  Vector w = options.initial_point.empty() ? space.center()
                                           : options.initial_point;
  if (!space.contains(w)) {
    throw InvalidArgument("run_phased_erm: initial point outside W");
  }
  PhasedResult result;
  const std::uint64_t start = oracles.draws_used();
  for (const PhaseRecord& ph : schedule.phases) {
    PhaseTrace trace;
    trace.anchor = w;
    const DatasetCollection data = oracles.draw_collection(ph.n_t);
    const SaddleCertificate cert = solve_phase(
        data, ph, loss, space, w, options.max_phase_iterations);
    trace.solution = cert.w_bar;
    trace.gap_upper = cert.gap_upper;
    trace.iterations = cert.iterations;
    const Vector xi = gaussian_noise(ph.sigma, space.dim(), rng);
    w = cert.w_bar;
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += xi[k];
    trace.noised = w;
    if (options.project_anchors) w = space.project(w);
    result.phases.push_back(std::move(trace));
  }
  result.w = result.phases.back().noised;
  result.draws_used = oracles.draws_used() - start;
  return result;
}

}  // namespace wgdp
