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

#include <bit>
#include <cmath>

#include "wgdp/errors.hpp"
#include "wgdp/mechanisms.hpp"

namespace wgdp {
namespace {

double variance(const Vector& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

TEST(Laplace, Examples) {
  RandomStream r(1);
  EXPECT_EQ(laplace_noise(0.0, r), 0.0);
  EXPECT_EQ(r.position(), 1u);  // the draw is consumed anyway
  EXPECT_EQ(laplace_from_uniform(1.0, 0.5), 0.0);
  EXPECT_NEAR(laplace_from_uniform(1.0, 0.75), std::log(2.0), 1e-15);
  EXPECT_NEAR(laplace_from_uniform(2.0, 0.25), -2.0 * std::log(2.0), 1e-15);
  EXPECT_THROW(laplace_noise(-1.0, r), InvalidArgument);
}

TEST(Laplace, VarianceIsTwoScaleSquared) {
  RandomStream r(2);
  Vector xs(1000000);
  for (double& x : xs) x = laplace_noise(1.0, r);
  EXPECT_NEAR(variance(xs), 2.0, 0.1);
}

TEST(Gaussian, Examples) {
  RandomStream r(3);
  EXPECT_EQ(gaussian_noise(0.0, 3, r), (Vector{0.0, 0.0, 0.0}));
  const Vector xs = gaussian_noise(2.0, 1000000, r);
  EXPECT_NEAR(variance(xs), 4.0, 0.2);
}

TEST(Gaussian, CoordinatesAreUncorrelated) {
  RandomStream r(4);
  const int n = 100000;
  double sxy = 0.0, sx = 0.0, sy = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vector v = gaussian_noise(1.0, 2, r);
    sxy += v[0] * v[1];
    sx += v[0];
    sy += v[1];
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  EXPECT_NEAR(cov, 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(PhasedSigma, Examples) {
  const double s = phased_noise_sigma(1.0, 16.0, 0.1, 0.05, 1.0, 1e-5);
  EXPECT_NEAR(s, 6.0 * std::sqrt(2.0 * 4.0 * std::log(1e5) * 0.005), 1e-12);
  EXPECT_NEAR(s, 4.0716, 1e-3);
  EXPECT_EQ(phased_noise_sigma(1.0, 16.0, 0.1, 0.05, kInfinity, 1e-5), 0.0);
  EXPECT_EQ(phased_noise_sigma(1.0, 16.0, 0.1, 0.05, 2.0, 1e-5), s / 2.0);
}

TEST(ReportNoisyMax, ExactArgmaxAtZeroScale) {
  RandomStream r(5);
  EXPECT_EQ(report_noisy_max(std::vector{10.0, 0.0, 0.0}, 0.0, r), 0u);
  EXPECT_EQ(report_noisy_max(std::vector{1.0, 3.0, 3.0}, 0.0, r), 1u);
  EXPECT_EQ(r.position(), 6u);
}

TEST(ReportNoisyMax, SymmetricOnEqualScores) {
  RandomStream r(6);
  const int n = 100000;
  std::vector<int> counts(4, 0);
  for (int k = 0; k < n; ++k) {
    ++counts[report_noisy_max(std::vector{0.0, 0.0, 0.0, 0.0}, 1.0, r)];
  }
  // Pearson chi-square, 3 degrees of freedom, 0.1% critical value.
  const double expected = n / 4.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 16.27);
}

TEST(ReportNoisyMax, LargeGapWins) {
  RandomStream r(7);
  int wins = 0;
  for (int k = 0; k < 10000; ++k) {
    if (report_noisy_max(std::vector{10.0, 0.0}, 1.0, r) == 0) ++wins;
  }
  EXPECT_GE(wins / 10000.0, 0.95);
}

TEST(Composition, Examples) {
  const PrivacyBudget one = calibrate_composed_budget({1.0, 1e-5}, 1);
  EXPECT_NEAR(one.epsilon, 1.0 / (2.0 * std::sqrt(2.0 * std::log(2e5))), 1e-15);
  EXPECT_NEAR(one.epsilon, 0.1013, 1e-3);
  EXPECT_DOUBLE_EQ(calibrate_composed_budget({1.0, 1e-5}, 10).delta, 5e-7);
  const double e4 = calibrate_composed_budget({1.0, 1e-5}, 4).epsilon;
  const double e16 = calibrate_composed_budget({1.0, 1e-5}, 16).epsilon;
  EXPECT_DOUBLE_EQ(e16, e4 / 2.0);
}

TEST(Composition, TotalStaysWithinBudget) {
  for (double eps : {0.1, 0.5, 1.0}) {
    for (std::uint64_t t : {1u, 10u, 1000u, 100000u}) {
      const double delta = 1e-5;
      const PrivacyBudget step = calibrate_composed_budget({eps, delta}, t);
      // slack delta/2 plus T * delta0 = delta/2
      EXPECT_LE(advanced_composition_epsilon(step.epsilon, t, delta / 2), eps);
      EXPECT_LE(static_cast<double>(t) * step.delta, delta / 2 * (1 + 1e-12));
    }
  }
}

TEST(NoisySgdNoise, ClosedForm) {
  const double n = 512, L = 1, B = 2, eps = 1, delta = 1e-5;
  const std::uint64_t T = 300;
  const NoiseScales s = noisy_sgd_noise(n, L, B, {eps, delta}, T);
  const double K = 1024, p = 2;
  const double tau = 4 * std::sqrt(2.0) * B * p *
                     std::sqrt(T * std::log(2 / delta)) / (K * eps);
  const double var = 256.0 * T * p * p * L * L * std::log(2.5 * T / delta) *
                     std::log(2 / delta) / (K * K * eps * eps);
  EXPECT_NEAR(s.laplace_tau, tau, 1e-12 * tau);
  EXPECT_NEAR(s.gaussian_sigma * s.gaussian_sigma, var, 1e-10 * var);
  const NoiseScales z = noisy_sgd_noise(n, L, B, PrivacyBudget::non_private(), T);
  EXPECT_EQ(z.gaussian_sigma, 0.0);
  EXPECT_EQ(z.laplace_tau, 0.0);
}

TEST(TreeNoise, ZeroSigmaGivesZeros) {
  TreeNoise t(16, 0.0, 3, RandomStream(1));
  for (std::uint64_t k = 1; k <= 16; ++k) {
    EXPECT_EQ(t.prefix(k), (Vector{0.0, 0.0, 0.0}));
  }
}

TEST(TreeNoise, DyadicNodeCounts) {
  EXPECT_EQ(TreeNoise::nodes_in_prefix(7), 3u);
  EXPECT_EQ(TreeNoise::nodes_in_prefix(4), 1u);
  TreeNoise a(8, 1.0, 2, RandomStream(2));
  a.prefix(7);
  EXPECT_EQ(a.nodes_generated(), 3u);
  TreeNoise b(8, 1.0, 2, RandomStream(2));
  b.prefix(4);
  EXPECT_EQ(b.nodes_generated(), 1u);
}

TEST(TreeNoise, ValuesDoNotDependOnQueryOrder) {
  TreeNoise a(8, 1.5, 2, RandomStream(3));
  TreeNoise b(8, 1.5, 2, RandomStream(3));
  const Vector direct = a.prefix(7);
  for (std::uint64_t k = 1; k <= 8; ++k) b.prefix(k);
  EXPECT_EQ(b.prefix(7), direct);
  EXPECT_EQ(a.prefix(7), direct);
  // prefix(6) - prefix(4) and prefix(5) - prefix(4) are distinct nodes.
  const Vector p4 = b.prefix(4), p5 = b.prefix(5), p6 = b.prefix(6);
  EXPECT_NE(p6[0] - p4[0], p5[0] - p4[0]);
}

TEST(TreeNoise, PrefixVarianceIsPopcountTimesNodeVariance) {
  const double sigma = 1.0;
  for (std::uint64_t t : {1u, 3u, 7u}) {
    Vector xs;
    RandomStream root(4);
    for (std::size_t rep = 0; rep < 20000; ++rep) {
      TreeNoise tree(8, sigma, 5, root.child(rep));
      const Vector v = tree.prefix(t);
      xs.insert(xs.end(), v.begin(), v.end());
    }
    const double target = static_cast<double>(std::popcount(t));
    EXPECT_NEAR(variance(xs), target, 0.05 * target) << "t=" << t;
  }
}

TEST(Budget, Validation) {
  EXPECT_THROW((PrivacyBudget{0.0, 1e-5}.validate()), InvalidArgument);
  EXPECT_THROW((PrivacyBudget{1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_NO_THROW(PrivacyBudget::non_private().validate());
  EXPECT_FALSE(PrivacyBudget::non_private().is_private());
}

}  // namespace
}  // namespace wgdp
