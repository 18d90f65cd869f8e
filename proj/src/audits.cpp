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


#include "wgdp/audits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wgdp/errors.hpp"
#include "wgdp/mechanisms.hpp"
#include "wgdp/online.hpp"
#include "wgdp/problem.hpp"
#include "wgdp/saddle.hpp"

namespace wgdp {
namespace {

std::string fmt(const char* pattern, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

AuditCheck check_le(std::string name, double measured, double limit) {
  return {std::move(name), measured, limit, measured <= limit, false};
}

double sample_variance(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

AuditCheck relative_check(std::string name, double measured, double target,
                          double tol) {
  const double rel = std::abs(measured - target) / target;
  AuditCheck c{std::move(name), rel, tol, rel <= tol, false};
  return c;
}

double best_fixed_total(const std::vector<Vector>& losses) {
  const std::size_t p = losses.front().size();
  double best = kInfinity;
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (const Vector& l : losses) s += l[i];
    best = std::min(best, s);
  }
  return best;
}

}  // namespace

bool AuditReport::passed() const { return violations() == 0; }

std::size_t AuditReport::violations() const {
  std::size_t v = 0;
  for (const AuditCheck& c : checks) {
    if (!c.informational && !c.passed) ++v;
  }
  return v;
}

double AuditReport::worst_margin() const {
  double worst = kInfinity;
  for (const AuditCheck& c : checks) {
    if (c.informational) continue;
    const double diff = c.limit - c.measured;
    const double m = c.limit != 0.0 ? diff / std::abs(c.limit) : diff;
    worst = std::min(worst, m);
  }
  return worst;
}

std::string format_report(const AuditReport& report) {
  std::ostringstream o;
  o.precision(6);
  for (const AuditCheck& c : report.checks) {
    o << (c.informational ? "INFO " : (c.passed ? "ok   " : "FAIL ")) << c.name
      << ": measured " << c.measured << " limit " << c.limit << '\n';
  }
  for (const std::string& n : report.notes) o << "note " << n << '\n';
  o << "audit " << report.kind << ": "
    << (report.passed() ? "PASS" : "FAIL") << " (" << report.violations()
    << " violations, worst margin " << report.worst_margin() << ")\n";
  return o.str();
}

// ---- stability -----------------------------------------------------------------

AuditReport audit_stability(const StabilityAuditOptions& o) {
  AuditReport r;
  r.kind = "stability";
  RandomStream rng(o.seed);
  const StabilityReport s =
      stability_probe(affine_stability_builder(o.dim, o.groups), o.n, o.mu_w,
                      o.mu_lambda, o.trials, rng);
  for (std::size_t t = 0; t < s.details.size(); ++t) {
    r.checks.push_back(check_le("trial " + std::to_string(t) + " distance",
                                s.details[t].distance, s.bound));
  }
  r.checks.push_back({"max ratio distance/bound", s.max_distance / s.bound,
                      1.0, s.max_distance < s.bound, true});
  r.notes.push_back(fmt("alpha = %.6g", s.alpha));
  r.notes.push_back(fmt("bound = %.6g", s.bound));
  r.notes.push_back(fmt("mean distance = %.6g", s.mean_distance));
  return r;
}

// ---- mechanisms ----------------------------------------------------------------

AuditReport audit_mechanisms(const MechanismAuditOptions& o) {
  AuditReport r;
  r.kind = "mechanisms";
  RandomStream root(o.seed);
  if (o.zero_scales) {
    std::size_t nonzero = 0;
    RandomStream a = root.child(0);
    for (std::size_t k = 0; k < o.draws; ++k) {
      if (laplace_noise(0.0, a) != 0.0) ++nonzero;
    }
    RandomStream b = root.child(1);
    for (double v : gaussian_noise(0.0, o.draws, b)) {
      if (v != 0.0) ++nonzero;
    }
    const std::uint64_t horizon = o.prefixes.empty()
                                      ? 1
                                      : *std::max_element(o.prefixes.begin(),
                                                          o.prefixes.end());
    TreeNoise tree(horizon, 0.0, o.tree_dim, root.child(2));
    for (std::uint64_t t = 1; t <= horizon; ++t) {
      for (double v : tree.prefix(t)) {
        if (v != 0.0) ++nonzero;
      }
    }
    const NoiseScales s =
        noisy_sgd_noise(64.0, 1.0, 1.0, PrivacyBudget::non_private(), 100);
    if (s.gaussian_sigma != 0.0) ++nonzero;
    if (s.laplace_tau != 0.0) ++nonzero;
    if (phased_noise_sigma(1.0, 16.0, 0.1, 0.05, kInfinity, 1e-5) != 0.0) {
      ++nonzero;
    }
    if (tree_sigma_node(1.0, 100, PrivacyBudget::non_private()) != 0.0) {
      ++nonzero;
    }
    r.checks.push_back({"nonzero noise outputs at zero scale",
                        static_cast<double>(nonzero), 0.0, nonzero == 0,
                        false});
    return r;
  }

  {
    RandomStream a = root.child(0);
    Vector xs(o.draws);
    for (double& x : xs) x = laplace_noise(o.laplace_scale, a);
    const double target = 2.0 * o.laplace_scale * o.laplace_scale;
    r.checks.push_back(relative_check("Laplace variance relative error",
                                      sample_variance(xs), target,
                                      o.relative_tolerance));
  }
  {
    RandomStream b = root.child(1);
    const Vector xs = gaussian_noise(o.gaussian_sigma, o.draws, b);
    r.checks.push_back(relative_check("Gaussian variance relative error",
                                      sample_variance(xs),
                                      o.gaussian_sigma * o.gaussian_sigma,
                                      o.relative_tolerance));
  }
  if (!o.prefixes.empty()) {
    const std::uint64_t horizon =
        *std::max_element(o.prefixes.begin(), o.prefixes.end());
    std::vector<Vector> samples(o.prefixes.size());
    RandomStream tree_root = root.child(2);
    for (std::size_t rep = 0; rep < o.tree_replays; ++rep) {
      TreeNoise tree(horizon, o.tree_sigma, o.tree_dim, tree_root.child(rep));
      for (std::size_t k = 0; k < o.prefixes.size(); ++k) {
        const Vector v = tree.prefix(o.prefixes[k]);
        samples[k].insert(samples[k].end(), v.begin(), v.end());
      }
    }
    for (std::size_t k = 0; k < o.prefixes.size(); ++k) {
      const double target =
          static_cast<double>(std::popcount(o.prefixes[k])) * o.tree_sigma *
          o.tree_sigma;
      r.checks.push_back(relative_check(
          "tree prefix variance relative error, t=" +
              std::to_string(o.prefixes[k]),
          sample_variance(samples[k]), target, o.relative_tolerance));
    }
  }
  const double sigma = phased_noise_sigma(1.0, 16.0, 0.1, 0.05, 1.0, 1e-5);
  r.checks.push_back(
      {"phased_noise_sigma(1,16,0.1,0.05,1,1e-5) - 4.0716",
       std::abs(sigma - 4.0716), 1e-3, std::abs(sigma - 4.0716) <= 1e-3,
       false});
  return r;
}

// ---- regret --------------------------------------------------------------------

std::vector<std::string> regret_families() {
  return {"iid-uniform", "one-good-arm", "switching", "stochastic-gap",
          "alternating"};
}

std::vector<Vector> regret_sequence(const std::string& family,
                                    std::uint64_t T, std::size_t p, double U,
                                    RandomStream& rng) {
  if (p < 2) throw InvalidArgument("regret_sequence: p >= 2");
  const double top = 2.0 * U;
  std::vector<Vector> out(T, Vector(p, top));
  for (std::uint64_t t = 0; t < T; ++t) {
    Vector& l = out[t];
    if (family == "iid-uniform") {
      for (double& v : l) v = top * rng.uniform();
    } else if (family == "one-good-arm") {
      l[0] = 0.0;
    } else if (family == "switching") {
      l[t < T / 2 ? 0 : 1] = 0.0;
    } else if (family == "stochastic-gap") {
      for (std::size_t i = 0; i < p; ++i) {
        l[i] = rng.uniform() < (i == 0 ? 0.4 : 0.6) ? top : 0.0;
      }
    } else if (family == "alternating") {
      l[0] = t % 2 == 0 ? top : 0.0;
      l[1] = t % 2 == 0 ? 0.0 : top;
    } else {
      throw InvalidArgument("unknown regret family '" + family + "'");
    }
  }
  return out;
}

double hedge_regret(const std::vector<Vector>& losses, double U) {
  const std::size_t p = losses.front().size();
  const double T = static_cast<double>(losses.size());
  const double eta = std::sqrt(std::log(static_cast<double>(p)) / (U * U * T));
  GroupWeights lambda = GroupWeights::uniform(p);
  double total = 0.0;
  for (const Vector& l : losses) {
    total += dot(lambda.values(), l);
    lambda = hedge_update(lambda, l, eta);
  }
  return total - best_fixed_total(losses);
}

double exp3_regret(const std::vector<Vector>& losses, double U,
                   RandomStream& rng) {
  const std::size_t p = losses.front().size();
  const double T = static_cast<double>(losses.size());
  const double eta = std::sqrt(std::log(static_cast<double>(p)) /
                               (static_cast<double>(p) * T * U * U));
  GroupWeights lambda = GroupWeights::uniform(p);
  double total = 0.0;
  for (const Vector& l : losses) {
    total += dot(lambda.values(), l);
    const std::size_t arm = sample_categorical(lambda, rng);
    lambda = exp3_update(lambda, arm, l[arm], eta);
  }
  return total - best_fixed_total(losses);
}

AuditReport audit_regret(const RegretAuditOptions& o) {
  AuditReport r;
  r.kind = "regret";
  RandomStream root(o.seed);
  std::uint64_t case_id = 0;
  for (std::uint64_t T : o.horizons) {
    for (std::size_t p : o.groups) {
      const double lnp = std::log(static_cast<double>(p));
      const double limit = 2.0 * o.U * std::sqrt(static_cast<double>(T) * lnp);
      const double bandit_form =
          2.0 * o.U *
          std::sqrt(static_cast<double>(p) * static_cast<double>(T) * lnp);
      for (const std::string& fam : regret_families()) {
        RandomStream seq_rng = root.child(case_id++);
        const std::vector<Vector> losses =
            regret_sequence(fam, T, p, o.U, seq_rng);
        const std::string tag = fam + " T=" + std::to_string(T) +
                                " p=" + std::to_string(p);
        r.checks.push_back(check_le("Hedge " + tag, hedge_regret(losses, o.U),
                                    limit));
        double mean = 0.0;
        RandomStream play_rng = root.child(case_id++);
        for (std::size_t k = 0; k < o.replays; ++k) {
          RandomStream run = play_rng.child(k);
          mean += exp3_regret(losses, o.U, run);
        }
        mean /= static_cast<double>(o.replays);
        r.checks.push_back(check_le("EXP3 " + tag, mean, limit));
        AuditCheck info = check_le("EXP3 vs 2U sqrt(p T ln p) " + tag, mean,
                                   bandit_form);
        info.informational = true;
        r.checks.push_back(info);
      }
    }
  }

  // Zero-noise DP-FTRL against lazy projected gradient descent.
  const std::size_t d = 3;
  const ParamSpace space(Vector(d, 0.0), 2.0);
  const LossSpec loss = make_loss(LossKind::kAffine, d, space, 1.0);
  RandomStream data_rng = root.child(case_id++);
  const double eta = 0.05;
  DpFtrl player(space, space.center(), eta, loss.lipschitz(),
                TreeNoise(o.ftrl_steps, 0.0, d, root.child(case_id++)),
                PrivacyBudget::non_private());
  Vector sum(d, 0.0);
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < o.ftrl_steps; ++t) {
    const DataPoint z =
        random_affine_point(space, loss.lipschitz(), loss.range_bound(),
                            data_rng);
    Vector g(d);
    loss.gradient(player.current(), z, g);
    const Vector got = player.next(z, loss);
    Vector target(d);
    for (std::size_t k = 0; k < d; ++k) {
      sum[k] += g[k];
      target[k] = space.center()[k] - eta * sum[k];
    }
    const Vector want = space.project(target);
    if (got != want) ++mismatches;
  }
  r.checks.push_back({"DP-FTRL zero noise vs lazy PGD mismatched iterates",
                      static_cast<double>(mismatches), 0.0, mismatches == 0,
                      false});
  return r;
}

// ---- reduction -----------------------------------------------------------------

AuditReport audit_reduction(const ReductionAuditOptions& o) {
  AuditReport r;
  r.kind = "reduction";
  if (o.grid_points < 2) throw InvalidArgument("audit_reduction: grid >= 2");
  RandomStream root(o.seed);
  RandomStream base_rng = root.child(0);
  RandomStream hard_rng = root.child(1);
  const Instance base = random_affine_instance(1, o.groups, 8, 2.0, base_rng);
  const Instance hard =
      build_hard_instance(base, ReductionMode::kEmpirical, o.n, hard_rng);
  const ParamSpace& W = hard.space;
  const double lo = W.center()[0] - W.radius();
  const double h = 2.0 * W.radius() / static_cast<double>(o.grid_points - 1);
  double minmax = kInfinity;
  double single = kInfinity;
  std::size_t wrong_argmax = 0;
  for (std::size_t k = 0; k < o.grid_points; ++k) {
    const Vector w{lo + h * static_cast<double>(k)};
    const WorstGroup worst = worst_group_risk(hard.groups, w, hard.loss);
    if (worst.group != 0) ++wrong_argmax;
    minmax = std::min(minmax, worst.value);
    single = std::min(single,
                      population_risk_exact(hard.groups[0], w, hard.loss).value);
  }
  r.checks.push_back({"|min-max value - group 0 minimum|",
                      std::abs(minmax - single), 0.0, minmax == single, false});
  r.checks.push_back({"grid points whose argmax group is not 0",
                      static_cast<double>(wrong_argmax), 0.0,
                      wrong_argmax == 0, false});
  r.notes.push_back(fmt("min-max value = %.17g", minmax));
  return r;
}

AuditReport run_audit(const std::string& kind, std::size_t trials,
                      std::uint64_t seed, bool zero_scales) {
  if (kind == "stability") {
    StabilityAuditOptions o;
    if (trials > 0) o.trials = trials;
    o.seed = seed;
    return audit_stability(o);
  }
  if (kind == "mechanisms") {
    MechanismAuditOptions o;
    o.seed = seed;
    o.zero_scales = zero_scales;
    return audit_mechanisms(o);
  }
  if (kind == "regret") {
    RegretAuditOptions o;
    o.seed = seed;
    if (trials > 0) o.replays = trials;
    return audit_regret(o);
  }
  if (kind == "reduction") {
    ReductionAuditOptions o;
    o.seed = seed;
    return audit_reduction(o);
  }
  throw InvalidArgument("unknown audit kind '" + kind + "'");
}

}  // namespace wgdp
