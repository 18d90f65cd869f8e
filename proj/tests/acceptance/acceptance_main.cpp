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


// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion ran to completion, whatever its
// verdict; `--strict` makes any FAIL return 1. A crash or an escaped
// exception returns 2.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "wgdp/audits.hpp"
#include "wgdp/empirical.hpp"
#include "wgdp/errors.hpp"
#include "wgdp/harness.hpp"
#include "wgdp/online.hpp"
#include "wgdp/phased_erm.hpp"
#include "wgdp/saddle.hpp"

namespace {

using namespace wgdp;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

DatasetCollection collection_of(const Instance& inst) {
  std::vector<Dataset> sets;
  for (const GroupDistribution& g : inst.groups) sets.push_back(g.support());
  return DatasetCollection(std::move(sets));
}

Vector random_point_in(const ParamSpace& W, double fraction, RandomStream& r) {
  Vector v(W.dim());
  double norm2 = 0.0;
  for (double& x : v) {
    x = r.standard_normal();
    norm2 += x * x;
  }
  const double scale = fraction * W.radius() * r.uniform() / std::sqrt(norm2);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = W.center()[k] + scale * v[k];
  return v;
}

void print_audit(const AuditReport& rep) {
  for (const AuditCheck& c : rep.checks) {
    if (!c.passed && !c.informational) {
      std::printf("    violation: %s measured %.6g limit %.6g\n", c.name.c_str(),
                  c.measured, c.limit);
    }
  }
}

// ---- 1 ----------------------------------------------------------------------

Verdict stability() {
  StabilityAuditOptions o;
  const AuditReport rep = audit_stability(o);
  // L = B = 1, n = 64.
  const double bound = (3.0 / 64.0) * (1.0 / 5.0 + 1.0 / std::sqrt(5.0 * 0.625));
  double max_dist = 0.0;
  std::size_t trials = 0;
  for (const AuditCheck& c : rep.checks) {
    if (c.informational) continue;
    ++trials;
    max_dist = std::max(max_dist, c.measured);
  }
  print_audit(rep);
  const bool ok = rep.passed() && std::abs(bound - 0.0358) < 1e-4 &&
                  max_dist <= bound && trials >= 100;
  return {ok, std::to_string(trials) + " pairs, max distance " +
                  fmt("%.5f", max_dist) + " vs bound " + fmt("%.5f", bound) +
                  ", violations " + std::to_string(rep.violations())};
}

// ---- 2 ----------------------------------------------------------------------

Verdict gap_bound() {
  RandomStream r(202);
  std::size_t violations = 0, not_shrinking = 0;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Instance inst = (i % 2 == 0) ? random_affine_instance(3, 3, 16, 2.0, r)
                                       : random_hinge_instance(3, 3, 16, 2.0, r);
    const DatasetCollection data = collection_of(inst);
    const double mu_w = 0.5 + r.uniform(), mu_l = 0.2 + r.uniform();
    const Vector anchor = random_point_in(inst.space, 0.9, r);
    const Vector start = random_point_in(inst.space, 1.0, r);
    RegularizedObjective obj(data, inst.loss, inst.space, mu_w, mu_l, anchor);
    const double L = inst.loss.lipschitz(), M = inst.space.diameter();
    double g1000 = 0.0;
    for (std::uint64_t N : {100u, 1000u}) {
      const double gap = solve_sc_sc(obj, N, start).gap_upper;
      const double nd = static_cast<double>(N);
      const double bound =
          (L + mu_w * M) * (L + mu_w * M) * (1.0 + std::log(nd)) / (2.0 * mu_w * nd);
      if (!(gap <= bound)) ++violations;
      worst = std::max(worst, gap / bound);
      if (N == 1000) g1000 = gap;
    }
    const double g50 = solve_sc_sc(obj, 50, start).gap_upper;
    if (!(g1000 < g50)) ++not_shrinking;
  }
  return {violations == 0 && not_shrinking == 0,
          "10 instances, max gap/bound " + fmt("%.4f", worst) + ", violations " +
              std::to_string(violations) + ", gap(1000) >= gap(50) on " +
              std::to_string(not_shrinking)};
}

// ---- 3 ----------------------------------------------------------------------

Verdict distance_bound() {
  RandomStream r(303);
  std::size_t violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t d = 1 + i % 3, p = 2 + i % 3;
    // Equal constants: the saddle is (anchor, uniform).
    const Vector values(p, r.uniform());
    const Instance inst = constant_loss_instance(d, values, 2.0);
    const DatasetCollection data = collection_of(inst);
    const double mu_w = 0.2 + 2 * r.uniform(), mu_l = 0.1 + r.uniform();
    const Vector anchor = random_point_in(inst.space, 0.9, r);
    const Vector start = random_point_in(inst.space, 1.0, r);
    RegularizedObjective obj(data, inst.loss, inst.space, mu_w, mu_l, anchor);
    const std::uint64_t N = (i % 2 == 0) ? 10 : 200;
    const SaddleCertificate c = solve_sc_sc(obj, N, start);
    const double dist = distance2(c.w_bar, anchor);
    const double bound = std::sqrt(2.0 * c.gap_upper / mu_w);
    bool uniform = true;
    for (std::size_t g = 0; g < p; ++g) {
      uniform = uniform && std::abs(c.lambda_bar[g] - 1.0 / static_cast<double>(p)) <= 1e-12;
    }
    if (!(dist <= bound) || !uniform) ++violations;
    if (bound > 0) worst = std::max(worst, dist / bound);
  }
  return {violations == 0, "20 instances, max distance/bound " +
                               fmt("%.4f", worst) + ", violations " +
                               std::to_string(violations)};
}

// ---- 4 ----------------------------------------------------------------------

Verdict reduction() {
  const AuditReport rep = audit_reduction({});
  print_audit(rep);
  return {rep.passed(), std::to_string(rep.checks.size()) + " checks, violations " +
                            std::to_string(rep.violations())};
}

// ---- 5 ----------------------------------------------------------------------

Verdict mechanisms() {
  const AuditReport rep = audit_mechanisms({});
  print_audit(rep);
  return {rep.passed(), "violations " + std::to_string(rep.violations()) +
                            ", worst relative margin " +
                            fmt("%.3f", rep.worst_margin())};
}

// ---- 6 ----------------------------------------------------------------------

Verdict regret() {
  const RegretAuditOptions o;
  const AuditReport rep = audit_regret(o);
  print_audit(rep);
  // Same sequences against the bandit-form threshold 2U sqrt(p T ln p).
  std::size_t exp3_sqrt_p_violations = 0;
  for (const AuditCheck& c : rep.checks) {
    if (c.informational && c.name.find("EXP3 vs") != std::string::npos &&
        !c.passed) {
      ++exp3_sqrt_p_violations;
    }
  }
  std::printf("    info: EXP3 against 2U sqrt(p T ln p): %zu violations\n",
              exp3_sqrt_p_violations);
  return {rep.passed(), "violations " + std::to_string(rep.violations()) +
                            " against 2U sqrt(T ln p)"};
}

// ---- 7 ----------------------------------------------------------------------

Verdict unbiasedness() {
  bool ok = true;
  double worst = 0.0;
  {
    const GroupWeights lambda({0.1, 0.2, 0.3, 0.4});
    const Vector loss{1.5, 0.2, 1.0, 0.7};
    RandomStream r(707);
    const int n = 100000;
    Vector sum(4, 0.0), sum_sq(4, 0.0);
    for (int k = 0; k < n; ++k) {
      const std::size_t arm = sample_categorical(lambda, r);
      const Vector e = importance_weighted_estimate(lambda, arm, loss[arm]);
      for (std::size_t i = 0; i < 4; ++i) {
        sum[i] += e[i];
        sum_sq[i] += e[i] * e[i];
      }
    }
    for (std::size_t i = 0; i < 4; ++i) {
      const double mean = sum[i] / n;
      const double se = std::sqrt((sum_sq[i] / n - mean * mean) / n);
      const double z = std::abs(mean - loss[i]) / se;
      worst = std::max(worst, z);
      ok = ok && z <= 3.0;
    }
  }
  {
    RandomStream g(708);
    const Instance inst = random_hinge_instance(3, 1, 40, 2.0, g);
    const Dataset& data = inst.groups[0].support();
    const Vector w{0.2, -0.3, 0.1};
    Vector full(3);
    empirical_risk_gradient(data, w, inst.loss, full);
    RandomStream r(709);
    const int n = 20000;
    Vector sum(3, 0.0), sum_sq(3, 0.0);
    for (int k = 0; k < n; ++k) {
      const Vector gk = minibatch_gradient(data, w, 6, inst.loss, r);
      for (int i = 0; i < 3; ++i) {
        sum[i] += gk[i];
        sum_sq[i] += gk[i] * gk[i];
      }
    }
    for (int i = 0; i < 3; ++i) {
      const double mean = sum[i] / n;
      const double se = std::sqrt((sum_sq[i] / n - mean * mean) / n);
      const double z = se > 0 ? std::abs(mean - full[i]) / se : 0.0;
      worst = std::max(worst, z);
      ok = ok && z <= 3.0;
    }
  }
  return {ok, "largest deviation " + fmt("%.2f", worst) + " standard errors"};
}

// ---- 8 / 9 ------------------------------------------------------------------

ExperimentConfig two_point(Algorithm a, std::uint64_t K, double eps, int seeds) {
  ExperimentConfig c;
  c.algorithm = a;
  c.K = K;
  c.epsilon = eps;
  c.seeds.clear();
  for (int s = 1; s <= seeds; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
  return c;
}

Verdict nonprivate_floors() {
  struct Case {
    const char* name;
    ExperimentConfig config;
  };
  std::vector<Case> cases{
      {"phased-erm K=8192", two_point(Algorithm::kPhasedErm, 8192, kInfinity, 10)},
      {"oco-game T=4096", two_point(Algorithm::kOcoGame, 8190, kInfinity, 10)},
      {"mgr T=10000", two_point(Algorithm::kMgr, 8192, kInfinity, 10)},
      {"baseline K=4096",
       two_point(Algorithm::kNonprivateBaseline, 4096, kInfinity, 10)}};
  cases[2].config.solver.rounds = 10000;
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const SuiteResult s = run_suite(c.config);
    const bool pass = s.summary.ok == c.config.seeds.size() &&
                      s.summary.mean_excess <= 0.1;
    ok = ok && pass;
    std::printf("    %-18s mean excess %.4f (se %.4f)%s\n", c.name,
                s.summary.mean_excess, s.summary.se_excess,
                pass ? "" : "  <-- above 0.1");
    if (!detail.empty()) detail += ", ";
    detail += fmt("%.3f", s.summary.mean_excess);
  }
  return {ok, "mean excess " + detail + " (limit 0.1)"};
}

Verdict privacy_trends() {
  bool ok = true;
  std::string detail;
  for (Algorithm a : {Algorithm::kPhasedErm, Algorithm::kOcoGame, Algorithm::kMgr}) {
    const SuiteResult small = run_suite(two_point(a, 512, 1.0, 20));
    const SuiteResult large = run_suite(two_point(a, 8192, 1.0, 20));
    const double pooled = std::sqrt(small.summary.se_excess * small.summary.se_excess +
                                    large.summary.se_excess * large.summary.se_excess);
    const double drop = small.summary.mean_excess - large.summary.mean_excess;
    const bool pass = small.summary.ok == 20 && large.summary.ok == 20 &&
                      drop >= pooled;
    ok = ok && pass;
    std::printf("    %-11s K=512 %.4f (se %.4f)  K=8192 %.4f (se %.4f)  drop %.4f vs %.4f%s\n",
                to_string(a).c_str(), small.summary.mean_excess,
                small.summary.se_excess, large.summary.mean_excess,
                large.summary.se_excess, drop, pooled, pass ? "" : "  <-- no trend");
    if (!detail.empty()) detail += ", ";
    detail += to_string(a) + (pass ? " ok" : " no trend");
  }
  return {ok, detail};
}

// ---- 10 ---------------------------------------------------------------------

Verdict phase_sensitivity() {
  const std::size_t p = 3, d = 4;
  const std::uint64_t K = 3 * 256;
  const ParamSpace space(Vector(d, 0.0), 1.0);
  const LossSpec loss = make_loss(LossKind::kAffine, d, space, 1.0);
  const double big_d = loss.scale();
  const double eta = default_eta(space.diameter(), big_d, K, p, 1.0, 1e-5, d);
  const PhasedSchedule s = make_schedule(K, p, eta, loss.lipschitz(),
                                         loss.range_bound(), big_d, 1.0, 1e-5);
  const PhaseRecord& ph = s.phases[0];
  const double bound =
      6.0 * big_d * std::sqrt(std::log2(static_cast<double>(s.n)) * ph.eta_t * eta);
  RandomStream r(1010);
  double max_dist = 0.0;
  std::size_t violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Dataset> sets;
    for (std::size_t i = 0; i < p; ++i) {
      Dataset ds(d);
      for (std::size_t j = 0; j < ph.n_t; ++j) {
        ds.push_back(random_affine_point(space, 1.0, loss.range_bound(), r));
      }
      sets.push_back(std::move(ds));
    }
    const DatasetCollection data(std::move(sets));
    const std::size_t group = static_cast<std::size_t>(r.uniform() * p);
    const std::size_t index = static_cast<std::size_t>(r.uniform() * ph.n_t);
    const DatasetCollection nb = make_neighbor(
        data, group, index, random_affine_point(space, 1.0, loss.range_bound(), r));
    const Vector anchor = space.center();
    const SaddleCertificate a = solve_phase(data, ph, loss, space, anchor);
    const SaddleCertificate b = solve_phase(nb, ph, loss, space, anchor);
    const double dist = distance2(a.w_bar, b.w_bar);
    max_dist = std::max(max_dist, dist);
    if (!(dist <= bound)) ++violations;
  }
  return {violations == 0, "50 pairs, max distance " + fmt("%.5f", max_dist) +
                               " vs bound " + fmt("%.5f", bound) +
                               ", violations " + std::to_string(violations)};
}

// ---- 11 ---------------------------------------------------------------------

Verdict accounting_and_replay() {
  bool ok = true;
  std::string detail;
  const Instance inst = build_two_point_instance();
  for (std::uint64_t K : {100u, 1000u, 4097u}) {
    const double eta = default_eta(inst.space.diameter(), inst.loss.scale(), K, 2,
                                   1.0, 1e-5, 1);
    const PhasedSchedule s =
        make_schedule(K, 2, eta, inst.loss.lipschitz(), inst.loss.range_bound(),
                      inst.loss.scale(), 1.0, 1e-5);
    std::uint64_t expect = 0;
    for (const PhaseRecord& ph : s.phases) expect += 2 * ph.n_t;
    SampleOracleSet o(inst.groups, K, RandomStream(K));
    RandomStream r(K + 1);
    const PhasedResult res = run_phased_erm(o, s, inst.loss, inst.space, r);
    ok = ok && res.draws_used == expect && o.draws_used() == expect && expect <= K;

    const GameConfig g = make_game_config(K, 2, 1, inst.loss, inst.space, {1.0, 1e-5});
    SampleOracleSet og(inst.groups, K, RandomStream(K + 2));
    RandomStream rg(K + 3);
    const GameResult gr = run_oco_game(og, g, inst.loss, inst.space, rg);
    ok = ok && gr.draws_used == 2 * (g.T - 1) && og.draws_used() == gr.draws_used &&
         gr.draws_used <= K;
  }
  detail = ok ? "draw counts exact" : "draw count mismatch";
  bool identical = true;
  std::uint64_t max_draws_over = 0;
  for (Algorithm a : {Algorithm::kPhasedErm, Algorithm::kOcoGame, Algorithm::kMgr,
                      Algorithm::kAgs, Algorithm::kNonprivateBaseline}) {
    ExperimentConfig c = two_point(a, 1024, 1.0, 3);
    const std::vector<SuiteResult> first{run_suite(c)};
    const std::vector<SuiteResult> second{run_suite(c)};
    identical = identical && to_csv(first) == to_csv(second);
    for (const TrialResult& t : first[0].trials) {
      if (!t.ok() || t.draws_used > c.K) ++max_draws_over;
    }
  }
  ok = ok && identical && max_draws_over == 0;
  detail += identical ? ", CSV replay bit-identical" : ", CSV replay differs";
  detail += ", rows over budget or failed " + std::to_string(max_draws_over);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) strict = true;
  }
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"stability bound", stability},
      {"duality-gap bound", gap_bound},
      {"distance bound", distance_bound},
      {"reduction identity", reduction},
      {"mechanism calibration", mechanisms},
      {"regret audits", regret},
      {"estimator unbiasedness", unbiasedness},
      {"non-private floors", nonprivate_floors},
      {"privacy-cost trends", privacy_trends},
      {"per-phase sensitivity", phase_sensitivity},
      {"accounting and replay", accounting_and_replay},
  };
  std::size_t passed = 0;
  try {
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      const Verdict v = criteria[i].run();
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      if (v.pass) ++passed;
      std::printf("criterion %2zu %-24s %s  %s [%.1fs]\n", i + 1, criteria[i].name,
                  v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
      std::fflush(stdout);
    }
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("acceptance: %zu/%zu criteria PASS\n", passed, criteria.size());
  return (strict && passed != criteria.size()) ? 1 : 0;
}
