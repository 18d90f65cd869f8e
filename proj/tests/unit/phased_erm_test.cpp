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


#include <gtest/gtest.h>

#include <cmath>

#include "wgdp/errors.hpp"
#include "wgdp/phased_erm.hpp"

namespace wgdp {
namespace {

TEST(Schedule, SmallExample) {
  const PhasedSchedule s = make_schedule(32, 2, 0.1, 1.0, 1.0, 1.0, 1.0, 1e-5);
  EXPECT_EQ(s.n, 16u);
  EXPECT_EQ(s.T, 4u);
  ASSERT_EQ(s.phases.size(), 4u);
  for (const PhaseRecord& ph : s.phases) EXPECT_EQ(ph.n_t, 4u);
  const PhaseRecord& p1 = s.phases[0];
  EXPECT_DOUBLE_EQ(p1.eta_t, 0.05);
  EXPECT_DOUBLE_EQ(p1.mu_w, 5.0);
  EXPECT_DOUBLE_EQ(p1.mu_lambda, 0.625);
  EXPECT_NEAR(p1.alpha, 1.0 / 640 + 1.0 / 80, 1e-15);
  EXPECT_NEAR(p1.alpha, 0.0140625, 1e-15);
  EXPECT_DOUBLE_EQ(s.phases[3].eta_t, 0.1 / 16);
  EXPECT_EQ(s.total_draws(), 32u);
}

TEST(Schedule, FloorsAndBudget) {
  for (std::uint64_t K : {12u, 100u, 1000u, 8191u}) {
    for (std::size_t p : {1u, 2u, 3u}) {
      const PhasedSchedule s = make_schedule(K, p, 0.1, 1, 1, 1, 1, 1e-5);
      EXPECT_EQ(s.n, K / p);
      EXPECT_EQ(s.T, static_cast<std::size_t>(std::floor(std::log2(s.n))));
      EXPECT_LE(s.total_draws(), K);
    }
  }
}

TEST(Schedule, NoPrivacyMeansNoNoise) {
  const PhasedSchedule s = make_schedule(1024, 2, 0.1, 1, 1, 1, kInfinity, 1e-5);
  for (const PhaseRecord& ph : s.phases) EXPECT_EQ(ph.sigma, 0.0);
}

TEST(Schedule, TooSmall) {
  EXPECT_THROW(make_schedule(7, 2, 0.1, 1, 1, 1, 1, 1e-5), InstanceTooSmall);
}

TEST(DefaultEta, Branches) {
  // ln(K/p) ~ 1 and epsilon huge: the statistical branch is the minimum.
  const std::uint64_t K = 2718;
  const std::size_t p = 1000;
  const double stat =
      std::sqrt(1000.0) / (std::pow(std::log(2718.0), 0.75) * std::sqrt(2718.0));
  EXPECT_NEAR(default_eta(1, 1, K, p, 1e12, 1e-5, 1), stat, 1e-15);
  // K/p = e, delta = 1/e, d = 4, eps = 1: privacy branch 1/sqrt(288).
  const double e = default_eta(1, 1, 2718281828, 1000000000, 1.0,
                               std::exp(-1.0), 4);
  EXPECT_NEAR(e, 1.0 / std::sqrt(288.0), 1e-6);
  EXPECT_NEAR(e, 0.0589, 1e-4);
  const double base = default_eta(1, 2, 4096, 2, 1, 1e-5, 3);
  EXPECT_DOUBLE_EQ(default_eta(10, 2, 4096, 2, 1, 1e-5, 3), 10 * base);
}

TEST(PhasedErm, SingleGroupPointMassReachesMinimizer) {
  // l(w) = 0.5 w + 0.5 on [-1, 1]: minimizer -1.
  const std::vector<GroupDistribution> groups{
      GroupDistribution::point_mass({{0.5}, 0.5, 0.0})};
  const LossSpec loss(LossKind::kAffine, 1.0, 2.0);
  const ParamSpace space({0.0}, 2.0);
  SampleOracleSet o(groups, 1024, RandomStream(1));
  const PhasedSchedule s =
      make_schedule(1024, 1, 0.05, 1.0, 2.0, 2.0, kInfinity, 1e-5);
  RandomStream r(2);
  const PhasedResult res = run_phased_erm(o, s, loss, space, r);
  EXPECT_LE(std::abs(res.w[0] + 1.0), 2.0 * 1e-2);
  EXPECT_EQ(res.draws_used, s.total_draws());
  EXPECT_EQ(o.draws_used(), s.total_draws());
}

TEST(PhasedErm, AccountingAndReplay) {
  const Instance inst = build_two_point_instance();
  const double eta = default_eta(2.0, 2.0, 512, 2, 1.0, 1e-5, 1);
  const PhasedSchedule s = make_schedule(512, 2, eta, 1.0, 2.0, 2.0, 1.0, 1e-5);
  Vector first;
  for (int rep = 0; rep < 2; ++rep) {
    SampleOracleSet o(inst.groups, 512, RandomStream(5));
    RandomStream r(6);
    const PhasedResult res = run_phased_erm(o, s, inst.loss, inst.space, r);
    EXPECT_EQ(res.draws_used, s.total_draws());
    EXPECT_LE(res.draws_used, 512u);
    EXPECT_EQ(res.phases.size(), s.T);
    if (rep == 0) {
      first = res.w;
    } else {
      EXPECT_EQ(res.w, first);
    }
    for (std::size_t t = 0; t < s.T; ++t) {
      EXPECT_LE(res.phases[t].gap_upper, s.phases[t].alpha);
      EXPECT_TRUE(inst.space.contains(res.phases[t].solution));
    }
  }
}

TEST(PhasedErm, BudgetChecked) {
  const Instance inst = build_two_point_instance();
  const PhasedSchedule s = make_schedule(512, 2, 0.01, 1, 2, 2, 1, 1e-5);
  SampleOracleSet o(inst.groups, 100, RandomStream(5));
  RandomStream r(6);
  EXPECT_THROW(run_phased_erm(o, s, inst.loss, inst.space, r), BudgetExhausted);
}

TEST(PhasedErm, PhaseOneSensitivityBound) {
  const std::size_t p = 3, d = 4;
  const std::uint64_t K = 3 * 256;
  const ParamSpace space(Vector(d, 0.0), 1.0);
  const LossSpec loss = make_loss(LossKind::kAffine, d, space, 1.0);
  const double big_d = loss.scale();
  const double eta = default_eta(1.0, big_d, K, p, 1.0, 1e-5, d);
  const PhasedSchedule s =
      make_schedule(K, p, eta, loss.lipschitz(), loss.range_bound(), big_d, 1.0, 1e-5);
  const double bound = phase_sensitivity_bound(s, 1);
  EXPECT_DOUBLE_EQ(bound, 6 * big_d * std::sqrt(std::log2(256.0) * s.phases[0].eta_t * eta));
  RandomStream r(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Dataset> sets;
    for (std::size_t i = 0; i < p; ++i) {
      Dataset ds(d);
      for (std::size_t j = 0; j < s.phases[0].n_t; ++j) {
        ds.push_back(random_affine_point(space, 1.0, loss.range_bound(), r));
      }
      sets.push_back(std::move(ds));
    }
    const DatasetCollection data(std::move(sets));
    const DatasetCollection nb = make_neighbor(
        data, trial % p, trial, random_affine_point(space, 1.0, loss.range_bound(), r));
    const Vector anchor(d, 0.0);
    const SaddleCertificate a = solve_phase(data, s.phases[0], loss, space, anchor);
    const SaddleCertificate b = solve_phase(nb, s.phases[0], loss, space, anchor);
    EXPECT_LE(distance2(a.w_bar, b.w_bar), bound);
  }
}

}  // namespace
}  // namespace wgdp
