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
#include <set>

#include "wgdp/errors.hpp"
#include "wgdp/numkit.hpp"

namespace wgdp {
namespace {

TEST(RandomStream, ReplayIsBitExact) {
  RandomStream a(42), b(42);
  for (int k = 0; k < 1000; ++k) {
    EXPECT_EQ(a.uniform(), b.uniform());
    EXPECT_EQ(a.standard_normal(), b.standard_normal());
  }
  EXPECT_EQ(a.position(), b.position());
}

TEST(RandomStream, DrawAccounting) {
  RandomStream r(1);
  r.uniform();
  EXPECT_EQ(r.position(), 1u);
  r.uniform_open();
  EXPECT_EQ(r.position(), 2u);
  r.standard_normal();
  EXPECT_EQ(r.position(), 4u);
}

TEST(RandomStream, ChildSeedsDoNotCollide) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t id = 0; id < 100000; ++id) {
    seen.insert(RandomStream::derive_seed(7, id));
  }
  EXPECT_EQ(seen.size(), 100000u);
  EXPECT_NE(RandomStream(7).child(0).next_u64(),
            RandomStream(7).child(1).next_u64());
}

TEST(RandomStream, UniformOpenExcludesEndpoints) {
  RandomStream r(3);
  for (int k = 0; k < 100000; ++k) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(GroupWeights, RejectsOffSimplex) {
  EXPECT_THROW(GroupWeights({0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(GroupWeights({-0.1, 1.1}), InvalidArgument);
  EXPECT_NO_THROW(GroupWeights({0.25, 0.75}));
  const GroupWeights n = GroupWeights::normalized({1.0, 3.0});
  EXPECT_DOUBLE_EQ(n[0], 0.25);
  EXPECT_THROW(GroupWeights::normalized({0.0, 0.0}), InvalidArgument);
}

TEST(Projection, InsideIsUnchanged) {
  const Vector v = project_l2_ball(std::vector{0.1, 0.2}, std::vector{0.0, 0.0}, 1.0);
  EXPECT_EQ(v, (Vector{0.1, 0.2}));
}

TEST(Projection, OutsideScalesByRadiusOverNorm) {
  const Vector v = project_l2_ball(std::vector{3.0, 4.0}, std::vector{0.0, 0.0}, 1.0);
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_NEAR(v[1], 0.8, 1e-15);
}

TEST(Projection, DegenerateBall) {
  const Vector v = project_l2_ball(std::vector{0.0, 0.0}, std::vector{0.0, 0.0}, 0.0);
  EXPECT_EQ(v, (Vector{0.0, 0.0}));
}

TEST(Projection, OffCenterAndIdempotent) {
  RandomStream r(11);
  const Vector c{1.0, -2.0, 0.5};
  for (int k = 0; k < 200; ++k) {
    Vector v(3);
    for (double& x : v) x = 10.0 * (r.uniform() - 0.5);
    const Vector p = project_l2_ball(v, c, 1.5);
    EXPECT_LE(distance2(p, c), 1.5 * (1 + 1e-12));
    EXPECT_EQ(project_l2_ball(p, c, 1.5), p);
    EXPECT_TRUE(in_l2_ball(p, c, 1.5));
  }
}

TEST(Projection, RejectsBadInput) {
  EXPECT_THROW(project_l2_ball(std::vector{1.0}, std::vector{0.0}, -1.0),
               InvalidArgument);
  EXPECT_THROW(project_l2_ball(std::vector{std::nan("")}, std::vector{0.0}, 1.0),
               InvalidArgument);
}

TEST(NegEntropy, Examples) {
  EXPECT_EQ(neg_entropy_term(GroupWeights::one_hot(3, 0)), 0.0);
  EXPECT_NEAR(neg_entropy_term(GroupWeights::uniform(4)), -std::log(4.0),
              1e-15);
  const double third = 1.0 / 3.0;
  EXPECT_NEAR(neg_entropy_term(GroupWeights({third, 1.0 - third})),
              third * std::log(third) + (1 - third) * std::log(1 - third),
              1e-15);
  EXPECT_NEAR(neg_entropy_term(GroupWeights({third, 1.0 - third})), -0.6365,
              1e-4);
}

TEST(Softmax, Examples) {
  const GroupWeights u = softmax_weights(std::vector{5.0, 5.0, 5.0}, 0.3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(u[i], 1.0 / 3.0, 1e-15);
  const GroupWeights w = softmax_weights(std::vector{0.0, std::log(2.0)}, 1.0);
  EXPECT_NEAR(w[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w[1], 2.0 / 3.0, 1e-15);
}

TEST(Softmax, NoOverflow) {
  const GroupWeights w = softmax_weights(std::vector{0.0, 1000.0}, 1.0);
  // exp(-1000) in long double is ~5e-435; as a double it underflows to 0.
  const long double ref = std::exp(-1000.0L) / (1.0L + std::exp(-1000.0L));
  EXPECT_EQ(w[0], static_cast<double>(ref));
  EXPECT_EQ(w[1], 1.0);
  EXPECT_NEAR(log_sum_exp(std::vector{0.0, 1000.0}), 1000.0, 1e-12);
}

TEST(Categorical, InverseCdf) {
  EXPECT_EQ(categorical_from_uniform(std::vector{0.5, 0.5}, 0.7), 1u);
  EXPECT_EQ(categorical_from_uniform(std::vector{0.5, 0.5}, 0.2), 0u);
  EXPECT_EQ(categorical_from_uniform(std::vector{0.0, 1.0, 0.0}, 0.999999), 1u);
  RandomStream r(5);
  for (int k = 0; k < 1000; ++k) {
    EXPECT_EQ(sample_categorical(GroupWeights::one_hot(3, 0), r), 0u);
  }
}

TEST(Categorical, FrequenciesWithinThreeStandardErrors) {
  const Vector probs{0.2, 0.3, 0.5};
  const GroupWeights w(probs);
  RandomStream r(17);
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int k = 0; k < n; ++k) ++counts[sample_categorical(w, r)];
  for (std::size_t i = 0; i < 3; ++i) {
    const double se = std::sqrt(probs[i] * (1 - probs[i]) / n);
    EXPECT_NEAR(counts[i] / static_cast<double>(n), probs[i], 3 * se);
  }
}

TEST(Vectors, BasicOps) {
  const Vector a{1.0, 2.0, 3.0}, b{4.0, 5.0, 6.0};
  EXPECT_EQ(dot(a, b), 32.0);
  EXPECT_NEAR(norm2(Vector{3.0, 4.0}), 5.0, 1e-15);
  Vector y = b;
  axpy(2.0, a, y);
  EXPECT_EQ(y, (Vector{6.0, 9.0, 12.0}));
  EXPECT_THROW(dot(a, Vector{1.0}), InvalidArgument);
}

}  // namespace
}  // namespace wgdp
