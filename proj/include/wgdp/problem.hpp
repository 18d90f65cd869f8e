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

// The worst-group problem model: data records, datasets, losses, group
// distributions with their sample oracles, risk evaluation and the
// synthetic instances used by tests and the harness.
//
// A data record is z = (x, s, shift) with x in R^d. The loss is
//   affine:  l(w, z) = <w, x> + s + shift
//   hinge:   l(w, z) = max(0, 1 - s <w, x>) + shift
// `shift` is zero except on augmented (lower-bound) instances, where group 0
// carries the constant offset that makes it the worst group everywhere.

#ifndef WGDP_PROBLEM_HPP_
#define WGDP_PROBLEM_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wgdp/numkit.hpp"

namespace wgdp {

struct DataPoint {
  Vector x;
  double scalar = 0.0;
  double shift = 0.0;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

// Column-major point set: feature k of every point is contiguous, so margins
// <w, x_j> for all j are d axpy passes over length-n columns.
class Dataset {
 public:
  explicit Dataset(std::size_t dim);
  Dataset(std::size_t dim, std::span<const DataPoint> points);

  std::size_t dim() const { return columns_.size(); }
  std::size_t size() const { return scalars_.size(); }
  bool empty() const { return scalars_.empty(); }

  void push_back(const DataPoint& point);
  void set(std::size_t index, const DataPoint& point);
  DataPoint point(std::size_t index) const;
  // Replaces the contents with the listed rows of `source` (repeats
  // allowed). The cached norm bound is inherited from `source`.
  void assign_rows(const Dataset& source, std::span<const std::size_t> rows);

  std::span<const double> column(std::size_t k) const { return columns_[k]; }
  std::span<const double> scalars() const { return scalars_; }
  std::span<const double> shifts() const { return shifts_; }
  // max_j ||x_j||, maintained on every mutation.
  double max_feature_norm() const { return max_norm_; }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.columns_ == b.columns_ && a.scalars_ == b.scalars_ &&
           a.shifts_ == b.shifts_;
  }

 private:
  void recompute_max_norm();

  std::vector<Vector> columns_;
  Vector scalars_;
  Vector shifts_;
  double max_norm_ = 0.0;
};

// p datasets of equal size n.
class DatasetCollection {
 public:
  explicit DatasetCollection(std::vector<Dataset> datasets);

  std::size_t groups() const { return datasets_.size(); }
  std::size_t per_group() const { return datasets_.front().size(); }
  std::size_t dim() const { return datasets_.front().dim(); }
  const Dataset& operator[](std::size_t i) const { return datasets_[i]; }
  const std::vector<Dataset>& datasets() const { return datasets_; }

  friend bool operator==(const DatasetCollection&,
                         const DatasetCollection&) = default;

 private:
  friend DatasetCollection make_neighbor(const DatasetCollection&,
                                         std::size_t, std::size_t,
                                         const DataPoint&);
  std::vector<Dataset> datasets_;
};

// Feasible set W: closed L2 ball of diameter M around `center`.
class ParamSpace {
 public:
  ParamSpace(Vector center, double diameter);

  std::size_t dim() const { return center_.size(); }
  const Vector& center() const { return center_; }
  double diameter() const { return diameter_; }
  double radius() const { return 0.5 * diameter_; }

  // Consistent with project(): true exactly when project(w) == w.
  bool contains(std::span<const double> w) const;
  Vector project(std::span<const double> w) const;

 private:
  Vector center_;
  double diameter_;
};

enum class LossKind { kAffine, kHinge };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

// A convex loss with declared Lipschitz constant L (also the bound on
// ||x||) and range bound B over the instance's W.
class LossSpec {
 public:
  LossSpec(LossKind kind, double lipschitz, double range_bound);

  LossKind kind() const { return kind_; }
  double lipschitz() const { return lipschitz_; }
  double range_bound() const { return range_bound_; }
  // D = max{L, B}
  double scale() const { return std::max(lipschitz_, range_bound_); }

  double evaluate(std::span<const double> w, const DataPoint& z) const;
  // Writes a subgradient; at the hinge kink the zero slope is used.
  void gradient(std::span<const double> w, const DataPoint& z,
                std::span<double> out) const;

  // Weighted loss over a point set: sum_j a_j l(w, z_j) with a_j = 1/n when
  // `point_weights` is empty. When `grad_out` is non-empty the matching
  // weighted subgradient is written there. Runs on the active SIMD kernels.
  double batch(const Dataset& data, std::span<const double> w,
               std::span<const double> point_weights,
               std::span<double> grad_out) const;

  // Mean loss (and mean subgradient when `grad_out` is non-empty) over the
  // rows `indices` of `data`, repeats allowed.
  double batch_indexed(const Dataset& data,
                       std::span<const std::size_t> indices,
                       std::span<const double> w,
                       std::span<double> grad_out) const;

  // Throws ContractViolation when a feature vector exceeds L.
  void check_point(const DataPoint& z) const;
  void check_dataset(const Dataset& data) const;

  friend bool operator==(const LossSpec&, const LossSpec&) = default;

 private:
  LossKind kind_;
  double lipschitz_;
  double range_bound_;
};

// Loss with tight declared constants for features bounded by
// `feature_bound` on `space`:
//   affine: L = feature_bound, B = M * feature_bound (offsets are chosen by
//           the instance so values stay in [0, B])
//   hinge:  L = feature_bound, B = 1 + (||center|| + M/2) * feature_bound
LossSpec make_loss(LossKind kind, std::size_t dim, const ParamSpace& space,
                   double feature_bound = 1.0);

// A group distribution: either a finite support with probabilities (exact
// expectations available) or a parametric sampler (Monte Carlo only).
class GroupDistribution {
 public:
  static GroupDistribution finite(Dataset support, Vector probabilities);
  static GroupDistribution point_mass(const DataPoint& point);
  // Uniform over the points of `data` (an empirical distribution).
  static GroupDistribution uniform_over(Dataset data);
  // x = Proj_{||x|| <= feature_bound}(mean + stddev * N(0, I)); fixed
  // scalar and shift. No exact expectation routine.
  static GroupDistribution gaussian_features(Vector mean, double stddev,
                                             double feature_bound,
                                             double scalar, double shift);

  std::size_t dim() const;
  bool has_finite_support() const { return parametric_ == nullptr; }
  const Dataset& support() const;
  const Vector& probabilities() const;

  DataPoint sample(RandomStream& rng) const;

  struct Parametric {
    Vector mean;
    double stddev;
    double feature_bound;
    double scalar;
    double shift;
  };
  const Parametric* parametric() const { return parametric_.get(); }

 private:
  GroupDistribution() = default;

  std::shared_ptr<const Dataset> support_;
  Vector probabilities_;
  std::shared_ptr<const Parametric> parametric_;
};

// Sample oracles C_1..C_p with a shared budget K enforced here.
class SampleOracleSet {
 public:
  SampleOracleSet(std::vector<GroupDistribution> distributions,
                  std::uint64_t budget, RandomStream rng);

  std::size_t groups() const { return distributions_.size(); }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t draws_used() const { return draws_used_; }
  std::uint64_t remaining() const { return budget_ - draws_used_; }

  // Throws BudgetExhausted when the draw would exceed K.
  DataPoint draw(std::size_t group);
  Dataset draw_dataset(std::size_t group, std::size_t n);
  DatasetCollection draw_collection(std::size_t n);

 private:
  std::vector<GroupDistribution> distributions_;
  std::uint64_t budget_;
  std::uint64_t draws_used_ = 0;
  RandomStream rng_;
};

// ---- risk evaluation ---------------------------------------------------------

// L_S(w). Throws InvalidArgument on an empty dataset.
double empirical_risk(const Dataset& data, std::span<const double> w,
                      const LossSpec& loss);
// grad L_S(w), returns L_S(w).
double empirical_risk_gradient(const Dataset& data, std::span<const double> w,
                               const LossSpec& loss, std::span<double> out);

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for exact evaluation
};

// Exact expectation over a finite support. UnsupportedMode on parametric.
RiskEstimate population_risk_exact(const GroupDistribution& dist,
                                   std::span<const double> w,
                                   const LossSpec& loss);
RiskEstimate population_risk_monte_carlo(const GroupDistribution& dist,
                                         std::span<const double> w,
                                         const LossSpec& loss,
                                         std::size_t samples,
                                         RandomStream& rng);

struct WorstGroup {
  double value = 0.0;
  std::size_t group = 0;  // lowest index among ties
};

WorstGroup worst_of(std::span<const double> group_risks);
WorstGroup worst_group_risk(const DatasetCollection& data,
                            std::span<const double> w, const LossSpec& loss);
// Exact per-group population risks (finite supports only).
WorstGroup worst_group_risk(std::span<const GroupDistribution> dists,
                            std::span<const double> w, const LossSpec& loss);

// Per-group empirical risks and their lambda-weighted gradient over a fixed
// collection. For affine losses every L_{S_i} is itself affine in w, so the
// group means are precomputed once and each call is O(p d); other losses go
// through the batch kernels.
class GroupRisks {
 public:
  GroupRisks(const DatasetCollection& data, LossSpec loss);

  std::size_t groups() const { return p_; }
  std::size_t dim() const { return d_; }
  const LossSpec& loss() const { return loss_; }

  void values(std::span<const double> w, std::span<double> out) const;
  // Writes risks and sum_i weights_i grad L_{S_i}(w).
  void values_and_weighted_gradient(std::span<const double> w,
                                    std::span<const double> weights,
                                    std::span<double> risks_out,
                                    std::span<double> grad_out) const;

 private:
  const DatasetCollection* data_;
  LossSpec loss_;
  std::size_t p_;
  std::size_t d_;
  bool linear_;
  std::vector<Vector> mean_x_;  // affine only
  Vector mean_offset_;          // affine only
  mutable Vector scratch_;
};

// ---- neighbors ---------------------------------------------------------------

// Copy of `data` with entry k of group j replaced by `z`.
DatasetCollection make_neighbor(const DatasetCollection& data,
                                std::size_t group, std::size_t index,
                                const DataPoint& z);

// Number of (group, index) entries that differ.
std::size_t hamming_distance(const DatasetCollection& a,
                             const DatasetCollection& b);

// ---- instances -----------------------------------------------------------------

struct AnalyticOptimum {
  double value = 0.0;
  Vector w;
};

struct Instance {
  std::string name;
  LossSpec loss;
  ParamSpace space;
  std::vector<GroupDistribution> groups;
  std::optional<AnalyticOptimum> optimum;

  std::size_t dim() const { return space.dim(); }
  std::size_t group_count() const { return groups.size(); }
  // True when every group is a point mass, so any sample equals the
  // population and empirical and population risks coincide.
  bool deterministic() const;
};

// d = 1, W = [-1, 1], affine loss; D_1 = (x = +1, b = 1), D_2 = (x = -1,
// b = 1). R(w) = 1 + |w|, optimum 1 at w = 0.
Instance build_two_point_instance();

enum class ReductionMode { kEmpirical, kPopulation };

// Augmented worst-group instance: every record of group 0 gets shift B,
// other groups shift 0, so L'_0 >= L'_i everywhere. `base` supplies the loss,
// W and the group distributions. In empirical mode each group is replaced
// by a dataset of `n` draws from it (uniform empirical distribution); in
// population mode the distributions are kept.
Instance build_hard_instance(const Instance& base, ReductionMode mode,
                             std::size_t n, RandomStream& rng);

// Random affine instance on the ball of diameter M around 0, features in the
// unit ball scaled by L, offsets drawn so every loss value lies in [0, B]
// with B = M L. Each group is uniform over `support` random points.
Instance random_affine_instance(std::size_t dim, std::size_t groups,
                                std::size_t support, double diameter,
                                RandomStream& rng, double lipschitz = 1.0);

// Same construction but hinge loss with random +-1 labels.
Instance random_hinge_instance(std::size_t dim, std::size_t groups,
                               std::size_t support, double diameter,
                               RandomStream& rng, double lipschitz = 1.0);

// Random affine point for a loss with the given L, B on `space`, with the
// offset drawn so the value stays in [0, B] on W.
DataPoint random_affine_point(const ParamSpace& space, double lipschitz,
                              double range_bound, RandomStream& rng);

// Affine records with x = 0: every group's loss is the constant `values[i]`.
Instance constant_loss_instance(std::size_t dim, std::span<const double> values,
                                double diameter);

}  // namespace wgdp

#endif  // WGDP_PROBLEM_HPP_
