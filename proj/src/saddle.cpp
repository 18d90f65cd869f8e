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

#include "wgdp/saddle.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include "wgdp/errors.hpp"

namespace wgdp {
namespace {

constexpr char kGapMethod[] =
    "closed-form max; dual-averaging lower model for min";

// Inner iterations spent per checkpoint in solve_to_alpha. The checkpoint
// only decides whether to stop early, so a loose bracket just means more
// outer iterations.
constexpr std::uint64_t kCheckpointInnerCap = 1000;

void require_feasible(const ParamSpace& space, std::span<const double> w,
                      const char* what) {
  if (w.size() != space.dim()) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch");
  }
  if (!space.contains(w)) {
    throw InvalidArgument(std::string(what) + ": w lies outside W");
  }
}

double half_sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return 0.5 * acc;
}

double weighted_sum(std::span<const double> weights,
                    std::span<const double> values) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] * values[i];
  }
  return acc;
}

// Incremental form of the best-response / projected-gradient iteration.
class SaddleRunner {
 public:
  SaddleRunner(const RegularizedObjective& obj, std::span<const double> w_init)
      : obj_(obj),
        w_(w_init.empty() ? obj.space().project(obj.anchor())
                          : Vector(w_init.begin(), w_init.end())),
        sum_w_(obj.dim(), 0.0),
        sum_lambda_(obj.groups(), 0.0),
        risks_(obj.groups()),
        grad_(obj.dim()) {
    require_feasible(obj.space(), w_, "solve_sc_sc w_init");
  }

  std::uint64_t iterations() const { return t_; }

  void step() {
    ++t_;
    obj_.group_risks(w_, risks_);
    const GroupWeights lambda = softmax_weights(risks_, obj_.mu_lambda());
    for (std::size_t k = 0; k < w_.size(); ++k) sum_w_[k] += w_[k];
    for (std::size_t i = 0; i < risks_.size(); ++i) {
      sum_lambda_[i] += lambda[i];
    }
    obj_.group_risks_and_gradient(w_, lambda.values(), risks_, grad_);
    const double mu = obj_.mu_w();
    const double eta = 1.0 / (mu * static_cast<double>(t_));
    const Vector& anchor = obj_.anchor();
    for (std::size_t k = 0; k < w_.size(); ++k) {
      w_[k] -= eta * (grad_[k] + mu * (w_[k] - anchor[k]));
    }
    w_ = obj_.space().project(w_);
  }

  Vector w_bar() const {
    Vector out(sum_w_);
    const double inv = 1.0 / static_cast<double>(t_);
    for (double& v : out) v *= inv;
    // Averages of feasible points are feasible up to rounding.
    return obj_.space().project(out);
  }

  GroupWeights lambda_bar() const {
    return GroupWeights::normalized(sum_lambda_);
  }

 private:
  const RegularizedObjective& obj_;
  Vector w_;
  Vector sum_w_;
  Vector sum_lambda_;
  Vector risks_;
  Vector grad_;
  std::uint64_t t_ = 0;
};

GapCertificate compute_gap(const RegularizedObjective& obj,
                           std::span<const double> w,
                           const GroupWeights& lambda, double inner_tol,
                           std::uint64_t inner_cap, bool throw_on_cap) {
  if (!(inner_tol > 0.0)) {
    throw InvalidArgument("duality_gap: inner_tol must be > 0");
  }
  if (inner_cap < 1) throw InvalidArgument("duality_gap: inner_cap < 1");
  require_feasible(obj.space(), w, "duality_gap");
  if (lambda.size() != obj.groups()) {
    throw InvalidArgument("duality_gap: lambda has the wrong size");
  }
  const std::size_t p = obj.groups();
  const std::size_t d = obj.dim();
  const double mu = obj.mu_w();
  const double mu_l = obj.mu_lambda();
  const Vector& anchor = obj.anchor();
  const ParamSpace& space = obj.space();

  GapCertificate cert;
  Vector risks(p);
  obj.group_risks(w, risks);
  Vector scaled(p);
  for (std::size_t i = 0; i < p; ++i) scaled[i] = risks[i] / mu_l;
  cert.max_value = mu_l * log_sum_exp(scaled) + mu * half_sq_dist(w, anchor);

  const double entropy_part = -mu_l * neg_entropy_term(lambda);
  const Vector& lam = lambda.values();

  // Lower model: c_bar + <s_bar, y> + mu/2 ||y - w'||^2 + entropy_part.
  auto model_min = [&](double c, std::span<const double> s, Vector& y) {
    Vector target(anchor);
    for (std::size_t k = 0; k < d; ++k) target[k] -= s[k] / mu;
    y = space.project(target);
    return c + dot(s, y) + mu * half_sq_dist(y, anchor) + entropy_part;
  };

  Vector x(w.begin(), w.end());
  Vector s(d);
  Vector s_sum(d, 0.0);
  Vector s_bar(d);
  Vector y_single;
  Vector y;
  double c_sum = 0.0;
  double weight_sum = 0.0;
  cert.min_upper = std::numeric_limits<double>::infinity();
  cert.min_lower = -std::numeric_limits<double>::infinity();
  cert.converged = false;
  for (std::uint64_t k = 1; k <= inner_cap; ++k) {
    cert.inner_iterations = k;
    obj.group_risks_and_gradient(x, lam, risks, s);
    const double lam_r = weighted_sum(lam, risks);
    cert.min_upper = std::min(
        cert.min_upper, lam_r + mu * half_sq_dist(x, anchor) + entropy_part);

    const double c_here = lam_r - dot(s, x);
    cert.min_lower =
        std::max(cert.min_lower, model_min(c_here, s, y_single));

    const double a = static_cast<double>(k);
    weight_sum += a;
    c_sum += a * c_here;
    for (std::size_t j = 0; j < d; ++j) {
      s_sum[j] += a * s[j];
      s_bar[j] = s_sum[j] / weight_sum;
    }
    cert.min_lower =
        std::max(cert.min_lower, model_min(c_sum / weight_sum, s_bar, y));

    if (cert.min_upper - cert.min_lower <= inner_tol) {
      cert.converged = true;
      break;
    }
    x = y;
  }

  const double allowance =
      8.0 * DBL_EPSILON * (std::abs(cert.max_value) + std::abs(cert.min_lower));
  cert.gap_upper = std::max(0.0, cert.max_value - cert.min_lower) + allowance;
  if (!cert.converged && throw_on_cap) {
    throw NonConvergence("duality_gap: inner bracket " +
                             std::to_string(cert.min_upper - cert.min_lower) +
                             " above tolerance after " +
                             std::to_string(inner_cap) + " iterations",
                         cert.gap_upper);
  }
  return cert;
}

SaddleCertificate make_certificate(const RegularizedObjective& obj,
                                   const SaddleRunner& runner,
                                   double inner_tol,
                                   std::uint64_t inner_cap) {
  SaddleCertificate out;
  out.w_bar = runner.w_bar();
  out.lambda_bar = runner.lambda_bar();
  const GapCertificate gap =
      compute_gap(obj, out.w_bar, out.lambda_bar, inner_tol, inner_cap, false);
  out.gap_upper = gap.gap_upper;
  out.gap_method = kGapMethod;
  out.iterations = runner.iterations();
  out.inner_converged = gap.converged;
  return out;
}

}  // namespace

// ---- RegularizedObjective ------------------------------------------------------

RegularizedObjective::RegularizedObjective(const DatasetCollection& data,
                                           LossSpec loss, ParamSpace space,
                                           double mu_w, double mu_lambda,
                                           Vector anchor)
    : data_(&data),
      risks_(data, loss),
      space_(std::move(space)),
      mu_w_(mu_w),
      mu_lambda_(mu_lambda),
      anchor_(std::move(anchor)) {
  if (!(mu_w_ > 0.0) || !std::isfinite(mu_w_)) {
    throw InvalidArgument("RegularizedObjective: mu_w must be finite, > 0");
  }
  if (!(mu_lambda_ > 0.0) || !std::isfinite(mu_lambda_)) {
    throw InvalidArgument(
        "RegularizedObjective: mu_lambda must be finite, > 0");
  }
  if (space_.dim() != data.dim() || anchor_.size() != data.dim()) {
    throw InvalidArgument("RegularizedObjective: dimension mismatch");
  }
  for (double a : anchor_) {
    if (!std::isfinite(a)) {
      throw InvalidArgument("RegularizedObjective: non-finite anchor");
    }
  }
}

double RegularizedObjective::anchor_reach() const {
  if (space_.contains(anchor_)) return space_.diameter();
  return std::max(space_.diameter(),
                  space_.radius() + distance2(anchor_, space_.center()));
}

void RegularizedObjective::group_risks(std::span<const double> w,
                                       std::span<double> out) const {
  risks_.values(w, out);
}

void RegularizedObjective::group_risks_and_gradient(
    std::span<const double> w, std::span<const double> weights,
    std::span<double> risks_out, std::span<double> grad_out) const {
  risks_.values_and_weighted_gradient(w, weights, risks_out, grad_out);
}

// ---- operations ---------------------------------------------------------------

double objective_value(const RegularizedObjective& obj,
                       std::span<const double> w, const GroupWeights& lambda,
                       std::span<double> grad_w) {
  require_feasible(obj.space(), w, "objective_value");
  if (lambda.size() != obj.groups()) {
    throw InvalidArgument("objective_value: lambda has the wrong size");
  }
  Vector risks(obj.groups());
  double value;
  if (grad_w.empty()) {
    obj.group_risks(w, risks);
  } else {
    if (grad_w.size() != obj.dim()) {
      throw InvalidArgument("objective_value: gradient size mismatch");
    }
    obj.group_risks_and_gradient(w, lambda.values(), risks, grad_w);
    for (std::size_t k = 0; k < grad_w.size(); ++k) {
      grad_w[k] += obj.mu_w() * (w[k] - obj.anchor()[k]);
    }
  }
  value = weighted_sum(lambda.values(), risks);
  value += obj.mu_w() * half_sq_dist(w, obj.anchor());
  value -= obj.mu_lambda() * neg_entropy_term(lambda);
  return value;
}

GroupWeights best_response_lambda(const RegularizedObjective& obj,
                                  std::span<const double> w) {
  require_feasible(obj.space(), w, "best_response_lambda");
  Vector risks(obj.groups());
  obj.group_risks(w, risks);
  return softmax_weights(risks, obj.mu_lambda());
}

GapCertificate duality_gap(const RegularizedObjective& obj,
                           std::span<const double> w,
                           const GroupWeights& lambda, double inner_tol,
                           std::uint64_t inner_cap) {
  return compute_gap(obj, w, lambda, inner_tol, inner_cap, true);
}

GapCertificate duality_gap_bounded(const RegularizedObjective& obj,
                                   std::span<const double> w,
                                   const GroupWeights& lambda,
                                   double inner_tol,
                                   std::uint64_t inner_cap) {
  return compute_gap(obj, w, lambda, inner_tol, inner_cap, false);
}

SaddleCertificate solve_sc_sc(const RegularizedObjective& obj,
                              std::uint64_t iterations,
                              std::span<const double> w_init,
                              const SaddleOptions& options) {
  if (iterations < 1) throw InvalidArgument("solve_sc_sc: N must be >= 1");
  SaddleRunner runner(obj, w_init);
  for (std::uint64_t t = 0; t < iterations; ++t) runner.step();
  return make_certificate(obj, runner, options.inner_tol, options.inner_cap);
}

SaddleCertificate solve_to_alpha(const RegularizedObjective& obj,
                                 double alpha, std::span<const double> w_init,
                                 std::uint64_t max_iterations) {
  if (!(alpha > 0.0)) throw InvalidArgument("solve_to_alpha: alpha <= 0");
  const std::uint64_t theory =
      iterations_for_alpha(alpha, obj.mu_w(), obj.mu_lambda(),
                           obj.loss().lipschitz(), obj.anchor_reach());
  const std::uint64_t cap = std::max<std::uint64_t>(
      1, std::min(theory, max_iterations));
  SaddleRunner runner(obj, w_init);
  std::uint64_t checkpoint = 1;
  while (true) {
    while (runner.iterations() < checkpoint) runner.step();
    SaddleCertificate cert =
        make_certificate(obj, runner, 0.25 * alpha, kCheckpointInnerCap);
    if (cert.gap_upper <= alpha || runner.iterations() >= cap) return cert;
    checkpoint = std::min(2 * checkpoint, cap);
  }
}

double sc_sc_gap_bound(double lipschitz, double diameter, double mu_w,
                       std::uint64_t iterations) {
  if (iterations < 1) throw InvalidArgument("sc_sc_gap_bound: N < 1");
  const double n = static_cast<double>(iterations);
  const double g = lipschitz + mu_w * diameter;
  return g * g * (1.0 + std::log(n)) / (2.0 * mu_w * n);
}

std::uint64_t iterations_for_alpha(double alpha, double mu_w,
                                   double mu_lambda, double lipschitz,
                                   double diameter) {
  if (!(alpha > 0.0)) {
    throw InvalidArgument("iterations_for_alpha: alpha must be > 0");
  }
  if (!(mu_w > 0.0) || !(mu_lambda > 0.0) || !(lipschitz > 0.0) ||
      !(diameter > 0.0)) {
    throw InvalidArgument("iterations_for_alpha: inputs must be > 0");
  }
  auto ok = [&](std::uint64_t n) {
    return sc_sc_gap_bound(lipschitz, diameter, mu_w, n) <= alpha;
  };
  if (ok(1)) return 1;
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
  std::uint64_t hi = 2;
  while (!ok(hi)) {
    if (hi >= kLimit) {
      throw InvalidArgument("iterations_for_alpha: alpha unreachable");
    }
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // ok(lo) is false
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

double stability_alpha(double lipschitz, double range_bound, double n,
                       double mu_w, double mu_lambda) {
  const double n2 = n * n;
  return lipschitz * lipschitz / (8.0 * n2 * mu_w) +
         range_bound * range_bound / (8.0 * n2 * mu_lambda);
}

double stability_bound(double lipschitz, double range_bound, double n,
                       double mu_w, double mu_lambda) {
  return (3.0 / n) *
         (lipschitz / mu_w + range_bound / std::sqrt(mu_w * mu_lambda));
}

BaselineResult nonprivate_baseline(SampleOracleSet& oracles, std::uint64_t K,
                                   const LossSpec& loss,
                                   const ParamSpace& space) {
  const std::size_t p = oracles.groups();
  const std::size_t n = static_cast<std::size_t>(K / p);
  if (n < 2) {
    throw InstanceTooSmall("nonprivate_baseline: need K >= 2p");
  }
  if (oracles.remaining() < n * p) {
    throw BudgetExhausted("nonprivate_baseline: oracle budget below K");
  }
  const double kd = static_cast<double>(K);
  const double pd = static_cast<double>(p);
  const double big_d = loss.scale();
  const double m = space.diameter();
  const double log_n = std::log(kd / pd);
  const double log_k = std::log(kd);

  BaselineResult out;
  out.per_group = n;
  out.mu_w = (big_d / m) * std::sqrt(pd / kd) * std::sqrt(log_n * log_k);
  out.mu_lambda =
      p == 1 ? 1.0
             : big_d * std::sqrt(pd * log_n * log_k / (kd * std::log(pd)));

  const DatasetCollection data = oracles.draw_collection(n);
  RegularizedObjective obj(data, loss, space, out.mu_w, out.mu_lambda,
                           space.center());
  const double alpha =
      stability_alpha(loss.lipschitz(), loss.range_bound(),
                      static_cast<double>(n), out.mu_w, out.mu_lambda);
  out.certificate = solve_to_alpha(obj, alpha);
  out.w = out.certificate.w_bar;
  return out;
}

// ---- stability probe ---------------------------------------------------------

StabilityCaseBuilder affine_stability_builder(std::size_t dim,
                                              std::size_t groups) {
  return [dim, groups](std::size_t n, RandomStream& rng) {
    ParamSpace space(Vector(dim, 0.0), 1.0);
    LossSpec loss = make_loss(LossKind::kAffine, dim, space, 1.0);
    std::vector<Dataset> sets;
    for (std::size_t i = 0; i < groups; ++i) {
      Dataset s(dim);
      for (std::size_t j = 0; j < n; ++j) {
        s.push_back(random_affine_point(space, loss.lipschitz(),
                                        loss.range_bound(), rng));
      }
      sets.push_back(std::move(s));
    }
    DatasetCollection original(std::move(sets));
    const std::size_t g =
        std::min(groups - 1, static_cast<std::size_t>(rng.uniform() * groups));
    const std::size_t k =
        std::min(n - 1, static_cast<std::size_t>(rng.uniform() * n));
    const DataPoint fresh =
        random_affine_point(space, loss.lipschitz(), loss.range_bound(), rng);
    DatasetCollection neighbor = make_neighbor(original, g, k, fresh);
    return StabilityCase{std::move(original), std::move(neighbor), loss,
                         space};
  };
}

StabilityReport stability_probe(const StabilityCaseBuilder& builder,
                                std::size_t n, double mu_w, double mu_lambda,
                                std::size_t trials, RandomStream& rng) {
  if (trials < 1) throw InvalidArgument("stability_probe: trials < 1");
  StabilityReport report;
  report.trials = trials;
  double total = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream trial_rng = rng.child(t);
    const StabilityCase c = builder(n, trial_rng);
    const double nd = static_cast<double>(n);
    const double lip = c.loss.lipschitz();
    const double range = c.loss.range_bound();
    report.alpha = stability_alpha(lip, range, nd, mu_w, mu_lambda);
    report.bound = stability_bound(lip, range, nd, mu_w, mu_lambda);
    RegularizedObjective a(c.original, c.loss, c.space, mu_w, mu_lambda,
                           c.space.center());
    RegularizedObjective b(c.neighbor, c.loss, c.space, mu_w, mu_lambda,
                           c.space.center());
    const SaddleCertificate sa = solve_to_alpha(a, report.alpha);
    const SaddleCertificate sb = solve_to_alpha(b, report.alpha);
    StabilityTrial trial{distance2(sa.w_bar, sb.w_bar), sa.gap_upper,
                         sb.gap_upper};
    report.max_distance = std::max(report.max_distance, trial.distance);
    total += trial.distance;
    if (trial.distance > report.bound) ++report.violations;
    report.details.push_back(trial);
  }
  report.mean_distance = total / static_cast<double>(trials);
  return report;
}

}  // namespace wgdp
