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

#include "wgdp/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wgdp/errors.hpp"
#include "wgdp/kernels.hpp"

namespace wgdp {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Points within this relative slack of the sphere count as inside, which
// makes projection idempotent bit-for-bit despite rounding in the rescale.
constexpr double kBallSlack = 1e-12;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) +
                          ")");
  }
}

}  // namespace

// ---- RandomStream -----------------------------------------------------------

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RandomStream::derive_seed(std::uint64_t parent,
                                        std::uint64_t stream_id) {
  return mix64(mix64(parent) + kGolden * (stream_id + 1));
}

std::uint64_t RandomStream::next_u64() {
  ++position_;
  return engine_();
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::standard_normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// ---- GroupWeights -----------------------------------------------------------

GroupWeights::GroupWeights(Vector weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgument("GroupWeights: empty");
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      throw InvalidArgument("GroupWeights: entry outside [0, 1]");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw InvalidArgument("GroupWeights: entries sum to " +
                          std::to_string(total));
  }
}

GroupWeights GroupWeights::uniform(std::size_t p) {
  if (p == 0) throw InvalidArgument("GroupWeights::uniform: p = 0");
  return GroupWeights(Vector(p, 1.0 / static_cast<double>(p)));
}

GroupWeights GroupWeights::one_hot(std::size_t p, std::size_t index) {
  if (index >= p) throw InvalidArgument("GroupWeights::one_hot: bad index");
  Vector w(p, 0.0);
  w[index] = 1.0;
  return GroupWeights(std::move(w));
}

GroupWeights GroupWeights::normalized(Vector unnormalized) {
  double total = 0.0;
  for (double w : unnormalized) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("GroupWeights::normalized: bad entry");
    }
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InvalidArgument("GroupWeights::normalized: non-positive total");
  }
  for (double& w : unnormalized) w /= total;
  return GroupWeights(std::move(unnormalized));
}

// ---- vector helpers ---------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> v) {
  return std::sqrt(kernels::active().sum_squares(v.data(), v.size()));
}

double distance2(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "distance2");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  kernels::active().axpy(a, x.data(), y.data(), x.size());
}

// ---- operations -------------------------------------------------------------

bool in_l2_ball(std::span<const double> v, std::span<const double> center,
                double radius) {
  require_same_size(v.size(), center.size(), "in_l2_ball");
  return distance2(v, center) <= radius * (1.0 + kBallSlack);
}

Vector project_l2_ball(std::span<const double> v,
                       std::span<const double> center, double radius) {
  require_same_size(v.size(), center.size(), "project_l2_ball");
  if (!(radius >= 0.0)) {
    throw InvalidArgument("project_l2_ball: negative radius");
  }
  const double dist = distance2(v, center);
  if (dist <= radius * (1.0 + kBallSlack)) return Vector(v.begin(), v.end());
  if (!std::isfinite(dist)) {
    throw InvalidArgument("project_l2_ball: non-finite input");
  }
  Vector out(center.begin(), center.end());
  const double scale = radius / dist;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] += scale * (v[i] - center[i]);
  }
  return out;
}

double neg_entropy_term(const GroupWeights& weights) {
  double acc = 0.0;
  for (double w : weights.values()) {
    if (w > 0.0) acc += w * std::log(w);
  }
  return acc;
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double xi : x) acc += std::exp(xi - top);
  return top + std::log(acc);
}

GroupWeights softmax_weights(std::span<const double> scores,
                             double temperature) {
  if (!(temperature > 0.0)) {
    throw InvalidArgument("softmax_weights: temperature must be > 0");
  }
  if (scores.empty()) throw InvalidArgument("softmax_weights: no scores");
  const double top = *std::max_element(scores.begin(), scores.end());
  Vector w(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp((scores[i] - top) / temperature);
    total += w[i];
  }
  for (double& wi : w) wi /= total;
  return GroupWeights(std::move(w));
}

std::size_t categorical_from_uniform(std::span<const double> probabilities,
                                     double u) {
  if (probabilities.empty()) {
    throw InvalidArgument("categorical_from_uniform: no categories");
  }
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  // Rounding left the total a hair below u.
  return last_positive;
}

std::size_t sample_categorical(const GroupWeights& weights,
                               RandomStream& rng) {
  return categorical_from_uniform(weights.values(), rng.uniform());
}

}  // namespace wgdp
