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

#include "wgdp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "wgdp/errors.hpp"
#include "wgdp/kernels.hpp"

namespace wgdp {
namespace {

// Relative slack on the declared feature bound.
constexpr double kNormSlack = 1e-12;

struct BatchScratch {
  Vector margin;
  Vector loss;
  Vector slope;

  void resize(std::size_t n) {
    margin.assign(n, 0.0);
    loss.resize(n);
    slope.resize(n);
  }
};

BatchScratch& scratch() {
  thread_local BatchScratch s;
  return s;
}

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw InvalidArgument(std::string(what) + ": dimension " +
                          std::to_string(got) + ", expected " +
                          std::to_string(want));
  }
}

Vector random_direction(std::size_t dim, RandomStream& rng) {
  Vector v(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& vi : v) vi = rng.standard_normal();
    norm = norm2(v);
  }
  for (double& vi : v) vi /= norm;
  return v;
}

// Uniform in the ball of radius `radius` about the origin.
Vector random_in_ball(std::size_t dim, double radius, RandomStream& rng) {
  Vector v = random_direction(dim, rng);
  const double r =
      radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  for (double& vi : v) vi *= r;
  return v;
}

}  // namespace

// ---- Dataset -------------------------------------------------------------------

Dataset::Dataset(std::size_t dim) : columns_(dim) {
  if (dim == 0) throw InvalidArgument("Dataset: dimension must be >= 1");
}

Dataset::Dataset(std::size_t dim, std::span<const DataPoint> points)
    : Dataset(dim) {
  for (auto& c : columns_) c.reserve(points.size());
  scalars_.reserve(points.size());
  shifts_.reserve(points.size());
  for (const DataPoint& z : points) push_back(z);
}

void Dataset::push_back(const DataPoint& point) {
  check_dim(point.x.size(), dim(), "Dataset::push_back");
  for (std::size_t k = 0; k < dim(); ++k) columns_[k].push_back(point.x[k]);
  scalars_.push_back(point.scalar);
  shifts_.push_back(point.shift);
  max_norm_ = std::max(max_norm_, norm2(point.x));
}

void Dataset::set(std::size_t index, const DataPoint& point) {
  if (index >= size()) throw InvalidArgument("Dataset::set: index out of range");
  check_dim(point.x.size(), dim(), "Dataset::set");
  for (std::size_t k = 0; k < dim(); ++k) columns_[k][index] = point.x[k];
  scalars_[index] = point.scalar;
  shifts_[index] = point.shift;
  recompute_max_norm();
}

DataPoint Dataset::point(std::size_t index) const {
  if (index >= size()) {
    throw InvalidArgument("Dataset::point: index out of range");
  }
  DataPoint z;
  z.x.resize(dim());
  for (std::size_t k = 0; k < dim(); ++k) z.x[k] = columns_[k][index];
  z.scalar = scalars_[index];
  z.shift = shifts_[index];
  return z;
}

void Dataset::assign_rows(const Dataset& source,
                          std::span<const std::size_t> rows) {
  check_dim(source.dim(), dim(), "Dataset::assign_rows");
  for (std::size_t k = 0; k < dim(); ++k) {
    Vector& col = columns_[k];
    const std::span<const double> src = source.column(k);
    col.resize(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) col[j] = src[rows[j]];
  }
  scalars_.resize(rows.size());
  shifts_.resize(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    scalars_[j] = source.scalars_[rows[j]];
    shifts_[j] = source.shifts_[rows[j]];
  }
  // Rows of the source are within its bound.
  max_norm_ = source.max_norm_;
}

void Dataset::recompute_max_norm() {
  max_norm_ = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    double acc = 0.0;
    for (const auto& c : columns_) acc += c[j] * c[j];
    max_norm_ = std::max(max_norm_, std::sqrt(acc));
  }
}

// ---- DatasetCollection -----------------------------------------------------------

DatasetCollection::DatasetCollection(std::vector<Dataset> datasets)
    : datasets_(std::move(datasets)) {
  if (datasets_.empty()) {
    throw InvalidArgument("DatasetCollection: need at least one group");
  }
  const std::size_t n = datasets_.front().size();
  const std::size_t d = datasets_.front().dim();
  for (const Dataset& s : datasets_) {
    if (s.size() != n) {
      throw InvalidArgument("DatasetCollection: unequal group sizes");
    }
    check_dim(s.dim(), d, "DatasetCollection");
  }
}

// ---- ParamSpace -------------------------------------------------------------------

ParamSpace::ParamSpace(Vector center, double diameter)
    : center_(std::move(center)), diameter_(diameter) {
  if (center_.empty()) throw InvalidArgument("ParamSpace: empty center");
  if (!(diameter_ > 0.0) || !std::isfinite(diameter_)) {
    throw InvalidArgument("ParamSpace: diameter must be finite and > 0");
  }
  for (double c : center_) {
    if (!std::isfinite(c)) throw InvalidArgument("ParamSpace: bad center");
  }
}

bool ParamSpace::contains(std::span<const double> w) const {
  return in_l2_ball(w, center_, radius());
}

Vector ParamSpace::project(std::span<const double> w) const {
  return project_l2_ball(w, center_, radius());
}

// ---- LossSpec ----------------------------------------------------------------------

std::string to_string(LossKind kind) {
  return kind == LossKind::kAffine ? "affine" : "hinge";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "affine") return LossKind::kAffine;
  if (name == "hinge") return LossKind::kHinge;
  throw InvalidArgument("unknown loss kind '" + name + "'");
}

LossSpec::LossSpec(LossKind kind, double lipschitz, double range_bound)
    : kind_(kind), lipschitz_(lipschitz), range_bound_(range_bound) {
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) {
    throw InvalidArgument("LossSpec: lipschitz must be finite and > 0");
  }
  if (!(range_bound_ > 0.0) || !std::isfinite(range_bound_)) {
    throw InvalidArgument("LossSpec: range bound must be finite and > 0");
  }
}

void LossSpec::check_point(const DataPoint& z) const {
  const double norm = norm2(z.x);
  if (norm > lipschitz_ * (1.0 + kNormSlack)) {
    throw ContractViolation("data point norm " + std::to_string(norm) +
                            " exceeds declared bound " +
                            std::to_string(lipschitz_));
  }
  if (kind_ == LossKind::kHinge && std::abs(z.scalar) != 1.0) {
    throw ContractViolation("hinge label must be +1 or -1");
  }
}

void LossSpec::check_dataset(const Dataset& data) const {
  if (data.max_feature_norm() > lipschitz_ * (1.0 + kNormSlack)) {
    throw ContractViolation("dataset feature norm " +
                            std::to_string(data.max_feature_norm()) +
                            " exceeds declared bound " +
                            std::to_string(lipschitz_));
  }
}

double LossSpec::evaluate(std::span<const double> w,
                          const DataPoint& z) const {
  check_dim(w.size(), z.x.size(), "LossSpec::evaluate");
  check_point(z);
  const double margin = dot(w, z.x);
  if (kind_ == LossKind::kAffine) return margin + z.scalar + z.shift;
  return std::max(0.0, 1.0 - z.scalar * margin) + z.shift;
}

void LossSpec::gradient(std::span<const double> w, const DataPoint& z,
                        std::span<double> out) const {
  check_dim(w.size(), z.x.size(), "LossSpec::gradient");
  check_dim(out.size(), z.x.size(), "LossSpec::gradient");
  check_point(z);
  double coef = 1.0;
  if (kind_ == LossKind::kHinge) {
    coef = (1.0 - z.scalar * dot(w, z.x) > 0.0) ? -z.scalar : 0.0;
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = coef * z.x[k];
}

double LossSpec::batch(const Dataset& data, std::span<const double> w,
                       std::span<const double> point_weights,
                       std::span<double> grad_out) const {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n == 0) throw InvalidArgument("LossSpec::batch: empty dataset");
  check_dim(w.size(), d, "LossSpec::batch");
  if (!point_weights.empty()) {
    check_dim(point_weights.size(), n, "LossSpec::batch weights");
  }
  if (!grad_out.empty()) check_dim(grad_out.size(), d, "LossSpec::batch grad");
  check_dataset(data);

  const kernels::KernelTable& k = kernels::active();
  BatchScratch& s = scratch();
  s.resize(n);
  for (std::size_t c = 0; c < d; ++c) {
    if (w[c] != 0.0) k.axpy(w[c], data.column(c).data(), s.margin.data(), n);
  }
  if (kind_ == LossKind::kAffine) {
    k.affine_terms(data.scalars().data(), data.shifts().data(),
                   s.margin.data(), s.loss.data(), s.slope.data(), n);
  } else {
    k.hinge_terms(data.scalars().data(), data.shifts().data(),
                  s.margin.data(), s.loss.data(), s.slope.data(), n);
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const double value = point_weights.empty()
                           ? k.sum(s.loss.data(), n) * inv_n
                           : k.dot(point_weights.data(), s.loss.data(), n);
  if (grad_out.empty()) return value;

  // Per-point gradient coefficient a_j * slope_j; gradient_c = <coef, col_c>.
  if (point_weights.empty()) {
    for (std::size_t j = 0; j < n; ++j) s.slope[j] *= inv_n;
  } else {
    k.multiply(s.slope.data(), point_weights.data(), n);
  }
  for (std::size_t c = 0; c < d; ++c) {
    grad_out[c] = k.dot(s.slope.data(), data.column(c).data(), n);
  }
  return value;
}

double LossSpec::batch_indexed(const Dataset& data,
                               std::span<const std::size_t> indices,
                               std::span<const double> w,
                               std::span<double> grad_out) const {
  const std::size_t m = indices.size();
  const std::size_t d = data.dim();
  if (m == 0) throw InvalidArgument("LossSpec::batch_indexed: empty batch");
  check_dim(w.size(), d, "LossSpec::batch_indexed");
  if (!grad_out.empty()) {
    check_dim(grad_out.size(), d, "LossSpec::batch_indexed grad");
  }
  check_dataset(data);
  for (std::size_t j : indices) {
    if (j >= data.size()) {
      throw InvalidArgument("LossSpec::batch_indexed: index out of range");
    }
  }
  thread_local Dataset gathered(1);
  thread_local std::size_t gathered_dim = 0;
  if (gathered_dim != d) {
    gathered = Dataset(d);
    gathered_dim = d;
  }
  gathered.assign_rows(data, indices);
  return batch(gathered, w, {}, grad_out);
}

LossSpec make_loss(LossKind kind, std::size_t dim, const ParamSpace& space,
                   double feature_bound) {
  if (dim == 0) throw InvalidArgument("make_loss: dimension must be >= 1");
  check_dim(space.dim(), dim, "make_loss");
  if (!(feature_bound > 0.0)) {
    throw InvalidArgument("make_loss: feature bound must be > 0");
  }
  if (kind == LossKind::kAffine) {
    return LossSpec(kind, feature_bound, space.diameter() * feature_bound);
  }
  const double reach = norm2(space.center()) + space.radius();
  return LossSpec(kind, feature_bound, 1.0 + reach * feature_bound);
}

// ---- GroupDistribution ---------------------------------------------------------------

GroupDistribution GroupDistribution::finite(Dataset support,
                                            Vector probabilities) {
  if (support.empty()) {
    throw InvalidArgument("GroupDistribution: empty support");
  }
  if (probabilities.size() != support.size()) {
    throw InvalidArgument("GroupDistribution: probability count mismatch");
  }
  double total = 0.0;
  for (double q : probabilities) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw InvalidArgument("GroupDistribution: bad probability");
    }
    total += q;
  }
  if (std::abs(total - 1.0) >
      1e-12 * static_cast<double>(probabilities.size())) {
    throw InvalidArgument("GroupDistribution: probabilities sum to " +
                          std::to_string(total));
  }
  GroupDistribution g;
  g.support_ = std::make_shared<const Dataset>(std::move(support));
  g.probabilities_ = std::move(probabilities);
  return g;
}

GroupDistribution GroupDistribution::point_mass(const DataPoint& point) {
  Dataset s(point.x.size());
  s.push_back(point);
  return finite(std::move(s), Vector{1.0});
}

GroupDistribution GroupDistribution::uniform_over(Dataset data) {
  const std::size_t n = data.size();
  if (n == 0) throw InvalidArgument("GroupDistribution: empty support");
  return finite(std::move(data), Vector(n, 1.0 / static_cast<double>(n)));
}

GroupDistribution GroupDistribution::gaussian_features(Vector mean,
                                                       double stddev,
                                                       double feature_bound,
                                                       double scalar,
                                                       double shift) {
  if (mean.empty()) throw InvalidArgument("gaussian_features: empty mean");
  if (!(stddev >= 0.0) || !(feature_bound > 0.0)) {
    throw InvalidArgument("gaussian_features: bad scale");
  }
  GroupDistribution g;
  g.parametric_ = std::make_shared<const Parametric>(
      Parametric{std::move(mean), stddev, feature_bound, scalar, shift});
  return g;
}

std::size_t GroupDistribution::dim() const {
  return parametric_ ? parametric_->mean.size() : support_->dim();
}

const Dataset& GroupDistribution::support() const {
  if (!support_) {
    throw UnsupportedMode("parametric distribution has no finite support");
  }
  return *support_;
}

const Vector& GroupDistribution::probabilities() const {
  if (!support_) {
    throw UnsupportedMode("parametric distribution has no finite support");
  }
  return probabilities_;
}

DataPoint GroupDistribution::sample(RandomStream& rng) const {
  if (parametric_) {
    const Parametric& p = *parametric_;
    DataPoint z;
    z.x.resize(p.mean.size());
    for (std::size_t k = 0; k < z.x.size(); ++k) {
      z.x[k] = p.mean[k] + p.stddev * rng.standard_normal();
    }
    const Vector origin(z.x.size(), 0.0);
    z.x = project_l2_ball(z.x, origin, p.feature_bound);
    z.scalar = p.scalar;
    z.shift = p.shift;
    return z;
  }
  const std::size_t idx = categorical_from_uniform(probabilities_, rng.uniform());
  return support_->point(idx);
}

// ---- SampleOracleSet ---------------------------------------------------------------

SampleOracleSet::SampleOracleSet(std::vector<GroupDistribution> distributions,
                                 std::uint64_t budget, RandomStream rng)
    : distributions_(std::move(distributions)),
      budget_(budget),
      rng_(std::move(rng)) {
  if (distributions_.empty()) {
    throw InvalidArgument("SampleOracleSet: need at least one group");
  }
  if (budget_ == 0) throw InvalidArgument("SampleOracleSet: budget K = 0");
}

DataPoint SampleOracleSet::draw(std::size_t group) {
  if (group >= distributions_.size()) {
    throw InvalidArgument("SampleOracleSet::draw: group out of range");
  }
  if (draws_used_ >= budget_) {
    throw BudgetExhausted("sample budget K = " + std::to_string(budget_) +
                          " exhausted");
  }
  ++draws_used_;
  return distributions_[group].sample(rng_);
}

Dataset SampleOracleSet::draw_dataset(std::size_t group, std::size_t n) {
  if (group >= distributions_.size()) {
    throw InvalidArgument("SampleOracleSet::draw_dataset: group out of range");
  }
  if (n > remaining()) {
    throw BudgetExhausted("requested " + std::to_string(n) + " draws with " +
                          std::to_string(remaining()) + " left of K = " +
                          std::to_string(budget_));
  }
  Dataset s(distributions_[group].dim());
  for (std::size_t j = 0; j < n; ++j) s.push_back(draw(group));
  return s;
}

DatasetCollection SampleOracleSet::draw_collection(std::size_t n) {
  if (n * distributions_.size() > remaining()) {
    throw BudgetExhausted("requested " +
                          std::to_string(n * distributions_.size()) +
                          " draws with " + std::to_string(remaining()) +
                          " left of K = " + std::to_string(budget_));
  }
  std::vector<Dataset> sets;
  sets.reserve(distributions_.size());
  for (std::size_t i = 0; i < distributions_.size(); ++i) {
    sets.push_back(draw_dataset(i, n));
  }
  return DatasetCollection(std::move(sets));
}

// ---- risks ------------------------------------------------------------------------

double empirical_risk(const Dataset& data, std::span<const double> w,
                      const LossSpec& loss) {
  if (data.empty()) throw InvalidArgument("empirical_risk: empty dataset");
  return loss.batch(data, w, {}, {});
}

double empirical_risk_gradient(const Dataset& data, std::span<const double> w,
                               const LossSpec& loss, std::span<double> out) {
  if (data.empty()) {
    throw InvalidArgument("empirical_risk_gradient: empty dataset");
  }
  return loss.batch(data, w, {}, out);
}

RiskEstimate population_risk_exact(const GroupDistribution& dist,
                                   std::span<const double> w,
                                   const LossSpec& loss) {
  if (!dist.has_finite_support()) {
    throw UnsupportedMode(
        "exact population risk needs a finite-support distribution");
  }
  return {loss.batch(dist.support(), w, dist.probabilities(), {}), 0.0};
}

RiskEstimate population_risk_monte_carlo(const GroupDistribution& dist,
                                         std::span<const double> w,
                                         const LossSpec& loss,
                                         std::size_t samples,
                                         RandomStream& rng) {
  if (samples < 2) {
    throw InvalidArgument("population_risk_monte_carlo: need >= 2 samples");
  }
  Dataset drawn(dist.dim());
  for (std::size_t j = 0; j < samples; ++j) drawn.push_back(dist.sample(rng));
  const double mean = loss.batch(drawn, w, {}, {});
  double sq = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    const double v = loss.evaluate(w, drawn.point(j)) - mean;
    sq += v * v;
  }
  const double n = static_cast<double>(samples);
  const double var = sq / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

WorstGroup worst_of(std::span<const double> group_risks) {
  if (group_risks.empty()) throw InvalidArgument("worst_of: no groups");
  WorstGroup best{group_risks[0], 0};
  for (std::size_t i = 1; i < group_risks.size(); ++i) {
    if (group_risks[i] > best.value) best = {group_risks[i], i};
  }
  return best;
}

WorstGroup worst_group_risk(const DatasetCollection& data,
                            std::span<const double> w, const LossSpec& loss) {
  Vector risks(data.groups());
  for (std::size_t i = 0; i < data.groups(); ++i) {
    risks[i] = empirical_risk(data[i], w, loss);
  }
  return worst_of(risks);
}

WorstGroup worst_group_risk(std::span<const GroupDistribution> dists,
                            std::span<const double> w, const LossSpec& loss) {
  Vector risks(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    risks[i] = population_risk_exact(dists[i], w, loss).value;
  }
  return worst_of(risks);
}

// ---- GroupRisks ---------------------------------------------------------------------

GroupRisks::GroupRisks(const DatasetCollection& data, LossSpec loss)
    : data_(&data),
      loss_(loss),
      p_(data.groups()),
      d_(data.dim()),
      linear_(loss.kind() == LossKind::kAffine),
      scratch_(data.dim()) {
  for (const Dataset& s : data.datasets()) loss_.check_dataset(s);
  if (!linear_) return;
  const kernels::KernelTable& k = kernels::active();
  const std::size_t n = data.per_group();
  const double inv_n = 1.0 / static_cast<double>(n);
  mean_x_.assign(p_, Vector(d_));
  mean_offset_.resize(p_);
  for (std::size_t i = 0; i < p_; ++i) {
    const Dataset& s = data[i];
    for (std::size_t c = 0; c < d_; ++c) {
      mean_x_[i][c] = k.sum(s.column(c).data(), n) * inv_n;
    }
    mean_offset_[i] = (k.sum(s.scalars().data(), n) +
                       k.sum(s.shifts().data(), n)) *
                      inv_n;
  }
}

void GroupRisks::values(std::span<const double> w,
                        std::span<double> out) const {
  check_dim(w.size(), d_, "GroupRisks::values");
  check_dim(out.size(), p_, "GroupRisks::values");
  for (std::size_t i = 0; i < p_; ++i) {
    out[i] = linear_ ? dot(w, mean_x_[i]) + mean_offset_[i]
                     : loss_.batch((*data_)[i], w, {}, {});
  }
}

void GroupRisks::values_and_weighted_gradient(
    std::span<const double> w, std::span<const double> weights,
    std::span<double> risks_out, std::span<double> grad_out) const {
  check_dim(weights.size(), p_, "GroupRisks weights");
  check_dim(grad_out.size(), d_, "GroupRisks gradient");
  std::fill(grad_out.begin(), grad_out.end(), 0.0);
  if (linear_) {
    values(w, risks_out);
    for (std::size_t i = 0; i < p_; ++i) {
      if (weights[i] != 0.0) axpy(weights[i], mean_x_[i], grad_out);
    }
    return;
  }
  check_dim(w.size(), d_, "GroupRisks w");
  check_dim(risks_out.size(), p_, "GroupRisks risks");
  for (std::size_t i = 0; i < p_; ++i) {
    risks_out[i] = loss_.batch((*data_)[i], w, {}, scratch_);
    if (weights[i] != 0.0) axpy(weights[i], scratch_, grad_out);
  }
}

// ---- neighbors -----------------------------------------------------------------------

DatasetCollection make_neighbor(const DatasetCollection& data,
                                std::size_t group, std::size_t index,
                                const DataPoint& z) {
  if (group >= data.groups()) {
    throw InvalidArgument("make_neighbor: group out of range");
  }
  if (index >= data.per_group()) {
    throw InvalidArgument("make_neighbor: index out of range");
  }
  DatasetCollection out = data;
  out.datasets_[group].set(index, z);
  return out;
}

std::size_t hamming_distance(const DatasetCollection& a,
                             const DatasetCollection& b) {
  if (a.groups() != b.groups() || a.per_group() != b.per_group() ||
      a.dim() != b.dim()) {
    throw InvalidArgument("hamming_distance: collections differ in shape");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.groups(); ++i) {
    for (std::size_t j = 0; j < a.per_group(); ++j) {
      if (!(a[i].point(j) == b[i].point(j))) ++count;
    }
  }
  return count;
}

// ---- instances -------------------------------------------------------------------------

bool Instance::deterministic() const {
  for (const GroupDistribution& g : groups) {
    if (!g.has_finite_support()) return false;
    const Dataset& s = g.support();
    for (std::size_t j = 1; j < s.size(); ++j) {
      if (!(s.point(j) == s.point(0))) return false;
    }
  }
  return true;
}

Instance build_two_point_instance() {
  std::vector<GroupDistribution> groups;
  groups.push_back(GroupDistribution::point_mass({{1.0}, 1.0, 0.0}));
  groups.push_back(GroupDistribution::point_mass({{-1.0}, 1.0, 0.0}));
  return Instance{"two-point",
                  LossSpec(LossKind::kAffine, 1.0, 2.0),
                  ParamSpace({0.0}, 2.0),
                  std::move(groups),
                  AnalyticOptimum{1.0, {0.0}}};
}

Instance build_hard_instance(const Instance& base, ReductionMode mode,
                             std::size_t n, RandomStream& rng) {
  const double b = base.loss.range_bound();
  std::vector<GroupDistribution> groups;
  groups.reserve(base.groups.size());
  for (std::size_t i = 0; i < base.groups.size(); ++i) {
    const double y = (i == 0) ? b : 0.0;
    const GroupDistribution& g = base.groups[i];
    if (mode == ReductionMode::kEmpirical) {
      if (n == 0) throw InvalidArgument("build_hard_instance: n = 0");
      Dataset s(g.dim());
      for (std::size_t j = 0; j < n; ++j) {
        DataPoint z = g.sample(rng);
        z.shift += y;
        s.push_back(z);
      }
      groups.push_back(GroupDistribution::uniform_over(std::move(s)));
    } else if (const auto* par = g.parametric()) {
      groups.push_back(GroupDistribution::gaussian_features(
          par->mean, par->stddev, par->feature_bound, par->scalar,
          par->shift + y));
    } else {
      Dataset s(g.dim());
      for (std::size_t j = 0; j < g.support().size(); ++j) {
        DataPoint z = g.support().point(j);
        z.shift += y;
        s.push_back(z);
      }
      groups.push_back(
          GroupDistribution::finite(std::move(s), g.probabilities()));
    }
  }
  return Instance{base.name + "-hard",
                  LossSpec(base.loss.kind(), base.loss.lipschitz(), 2.0 * b),
                  base.space, std::move(groups), std::nullopt};
}

DataPoint random_affine_point(const ParamSpace& space, double lipschitz,
                              double range_bound, RandomStream& rng) {
  DataPoint z;
  z.x = random_in_ball(space.dim(), lipschitz, rng);
  const double spread = space.radius() * norm2(z.x);
  const double base = dot(space.center(), z.x);
  const double lo = spread - base;
  const double hi = range_bound - spread - base;
  if (hi < lo) {
    throw InvalidArgument("random_affine_point: range bound below M * L");
  }
  z.scalar = lo + rng.uniform() * (hi - lo);
  return z;
}

Instance random_affine_instance(std::size_t dim, std::size_t groups,
                                std::size_t support, double diameter,
                                RandomStream& rng, double lipschitz) {
  if (groups == 0 || support == 0) {
    throw InvalidArgument("random_affine_instance: empty instance");
  }
  ParamSpace space(Vector(dim, 0.0), diameter);
  LossSpec loss = make_loss(LossKind::kAffine, dim, space, lipschitz);
  std::vector<GroupDistribution> dists;
  for (std::size_t i = 0; i < groups; ++i) {
    Dataset s(dim);
    for (std::size_t j = 0; j < support; ++j) {
      s.push_back(
          random_affine_point(space, lipschitz, loss.range_bound(), rng));
    }
    dists.push_back(GroupDistribution::uniform_over(std::move(s)));
  }
  return Instance{"random-affine", loss, space, std::move(dists),
                  std::nullopt};
}

Instance random_hinge_instance(std::size_t dim, std::size_t groups,
                               std::size_t support, double diameter,
                               RandomStream& rng, double lipschitz) {
  if (groups == 0 || support == 0) {
    throw InvalidArgument("random_hinge_instance: empty instance");
  }
  ParamSpace space(Vector(dim, 0.0), diameter);
  LossSpec loss = make_loss(LossKind::kHinge, dim, space, lipschitz);
  std::vector<GroupDistribution> dists;
  for (std::size_t i = 0; i < groups; ++i) {
    Dataset s(dim);
    for (std::size_t j = 0; j < support; ++j) {
      DataPoint z;
      z.x = random_in_ball(dim, lipschitz, rng);
      z.scalar = rng.uniform() < 0.5 ? -1.0 : 1.0;
      s.push_back(z);
    }
    dists.push_back(GroupDistribution::uniform_over(std::move(s)));
  }
  return Instance{"random-hinge", loss, space, std::move(dists),
                  std::nullopt};
}

Instance constant_loss_instance(std::size_t dim, std::span<const double> values,
                                double diameter) {
  if (values.empty()) {
    throw InvalidArgument("constant_loss_instance: no groups");
  }
  double top = 0.0;
  std::vector<GroupDistribution> groups;
  for (double v : values) {
    if (!(v >= 0.0)) {
      throw InvalidArgument("constant_loss_instance: negative value");
    }
    top = std::max(top, v);
    groups.push_back(
        GroupDistribution::point_mass({Vector(dim, 0.0), v, 0.0}));
  }
  ParamSpace space(Vector(dim, 0.0), diameter);
  return Instance{"constant",
                  LossSpec(LossKind::kAffine, 1.0, std::max(1.0, top)),
                  space, std::move(groups),
                  AnalyticOptimum{top, Vector(dim, 0.0)}};
}

}  // namespace wgdp
