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

// Deterministic numeric building blocks shared by every solver: the seeded
// random stream, L2-ball projection, simplex weights and their entropy,
// softmax and categorical sampling.

#ifndef WGDP_NUMKIT_HPP_
#define WGDP_NUMKIT_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace wgdp {

using Vector = std::vector<double>;
// A model parameter w. Plain vector; feasibility is a property of the
// ParamSpace it is checked against, not of the value itself.
using ParamVector = Vector;

// Seeded pseudorandom stream with a fixed draw budget per variate.
//
//   uniform()          1 engine draw, 53-bit mantissa in [0, 1)
//   uniform_open()     1 engine draw, in (0, 1)
//   standard_normal()  2 engine draws (Box-Muller, cosine branch only)
//
// Child streams: derive_seed(parent, id) is a bijection of `id` for a fixed
// parent, so distinct ids never collide. The derivation is
//   mix(mix(parent) + 0x9E3779B97F4A7C15 * (id + 1))
// with mix the splitmix64 finalizer.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  // Number of engine draws consumed so far.
  std::uint64_t position() const { return position_; }

  std::uint64_t next_u64();
  double uniform();
  double uniform_open();
  double standard_normal();

  RandomStream child(std::uint64_t stream_id) const {
    return RandomStream(derive_seed(seed_, stream_id));
  }
  static std::uint64_t derive_seed(std::uint64_t parent,
                                   std::uint64_t stream_id);

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

// A point on the probability simplex. Entries lie in [0, 1] and sum to 1
// within 1e-12.
class GroupWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Validates; throws InvalidArgument on a non-simplex input.
  explicit GroupWeights(Vector weights);

  static GroupWeights uniform(std::size_t p);
  static GroupWeights one_hot(std::size_t p, std::size_t index);
  // Divides by the sum. Throws unless entries are finite, >= 0, sum > 0.
  static GroupWeights normalized(Vector unnormalized);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const Vector& values() const { return weights_; }

  friend bool operator==(const GroupWeights&, const GroupWeights&) = default;

 private:
  Vector weights_;
};

// ---- small vector helpers --------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double distance2(std::span<const double> a, std::span<const double> b);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

// ---- operations ------------------------------------------------------------

// Membership test matching project_l2_ball: true exactly when the
// projection would return `v` unchanged.
bool in_l2_ball(std::span<const double> v, std::span<const double> center,
                double radius);

// Euclidean projection onto the closed ball {x : ||x - center|| <= radius}.
// Returns `v` unchanged (bit-exact) when it is already inside.
Vector project_l2_ball(std::span<const double> v,
                       std::span<const double> center, double radius);

// sum_j w_j log w_j with 0 log 0 = 0. Lies in [-log p, 0].
double neg_entropy_term(const GroupWeights& weights);

// log sum_i exp(x_i), max-shifted.
double log_sum_exp(std::span<const double> x);

// weights_i proportional to exp(scores_i / temperature), max-shifted.
GroupWeights softmax_weights(std::span<const double> scores,
                             double temperature);

// Inverse CDF on a single uniform u in [0, 1): the first index whose
// left-to-right cumulative sum exceeds u. Zero-probability entries are never
// returned.
std::size_t categorical_from_uniform(std::span<const double> probabilities,
                                     double u);

// One uniform draw, then categorical_from_uniform.
std::size_t sample_categorical(const GroupWeights& weights, RandomStream& rng);

}  // namespace wgdp

#endif  // WGDP_NUMKIT_HPP_
