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

// The entropy-regularized empirical minimax objective
//
//   F(w, lambda) = sum_i lambda_i L_{S_i}(w) + mu_w/2 ||w - w'||^2
//                  - mu_lambda sum_j lambda_j log lambda_j
//
// over W x simplex, its best-response / gradient-descent saddle solver,
// certified duality gaps, and the stability probe built on them.

#ifndef WGDP_SADDLE_HPP_
#define WGDP_SADDLE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "wgdp/numkit.hpp"
#include "wgdp/problem.hpp"

namespace wgdp {

class RegularizedObjective {
 public:
  // The anchor may lie outside W (phased ERM anchors on noised iterates).
  RegularizedObjective(const DatasetCollection& data, LossSpec loss,
                       ParamSpace space, double mu_w, double mu_lambda,
                       Vector anchor);

  const DatasetCollection& data() const { return *data_; }
  const LossSpec& loss() const { return risks_.loss(); }
  const ParamSpace& space() const { return space_; }
  double mu_w() const { return mu_w_; }
  double mu_lambda() const { return mu_lambda_; }
  const Vector& anchor() const { return anchor_; }
  std::size_t groups() const { return risks_.groups(); }
  std::size_t dim() const { return risks_.dim(); }

  // Largest ||w - w'|| over W: M when the anchor is feasible, otherwise
  // radius + ||w' - center||.
  double anchor_reach() const;

  void group_risks(std::span<const double> w, std::span<double> out) const;
  // Risks and sum_i weights_i grad L_{S_i}(w) (loss part only).
  void group_risks_and_gradient(std::span<const double> w,
                                std::span<const double> weights,
                                std::span<double> risks_out,
                                std::span<double> grad_out) const;

 private:
  const DatasetCollection* data_;
  GroupRisks risks_;
  ParamSpace space_;
  double mu_w_;
  double mu_lambda_;
  Vector anchor_;
};

// F(w, lambda). When `grad_w` is non-empty it receives
// sum_i lambda_i grad L_{S_i}(w) + mu_w (w - w'). Infeasible w throws
// InvalidArgument.
double objective_value(const RegularizedObjective& obj,
                       std::span<const double> w, const GroupWeights& lambda,
                       std::span<double> grad_w = {});

// lambda_i proportional to exp(L_{S_i}(w) / mu_lambda).
GroupWeights best_response_lambda(const RegularizedObjective& obj,
                                  std::span<const double> w);

struct GapCertificate {
  double gap_upper = 0.0;     // certified upper bound on the true gap
  double max_value = 0.0;     // max_lambda F(w, lambda), exact
  double min_lower = 0.0;     // certified lower bound on min_w F(w, lambda)
  double min_upper = 0.0;     // best F(x, lambda) seen by the inner solver
  std::uint64_t inner_iterations = 0;
  bool converged = true;      // inner bracket closed to inner_tol
};

inline constexpr std::uint64_t kDefaultInnerCap = 20000;

// max_lambda' F(w, lambda') - min_w' F(w', lambda).
//
// The max is the closed form mu_lambda LSE(L(w)/mu_lambda) +
// mu_w/2 ||w - w'||^2. The min is bracketed by weighted dual averaging on
// the loss linearizations with the quadratic kept exact: the lower model is
// minimized at Proj_W(w' - s_bar / mu_w), where s_bar is the weighted mean
// of loss subgradients (weights proportional to the iteration index), and
// that point is the next iterate. The single-point model at the current
// iterate (the gradient-mapping bound) is also tried. Iteration stops once
// upper - lower <= inner_tol. The returned bound includes a rounding
// allowance of a few ulps of the compared values.
//
// Throws NonConvergence (carrying the best bound) after `inner_cap`
// iterations.
GapCertificate duality_gap(const RegularizedObjective& obj,
                           std::span<const double> w,
                           const GroupWeights& lambda, double inner_tol,
                           std::uint64_t inner_cap = kDefaultInnerCap);

// Same computation but returns the best bound instead of throwing.
GapCertificate duality_gap_bounded(const RegularizedObjective& obj,
                                   std::span<const double> w,
                                   const GroupWeights& lambda,
                                   double inner_tol,
                                   std::uint64_t inner_cap = kDefaultInnerCap);

struct SaddleCertificate {
  ParamVector w_bar;
  GroupWeights lambda_bar = GroupWeights::uniform(1);
  double gap_upper = 0.0;
  std::string gap_method;
  std::uint64_t iterations = 0;
  bool inner_converged = true;
};

struct SaddleOptions {
  double inner_tol = 1e-9;
  std::uint64_t inner_cap = kDefaultInnerCap;
};

// Projected gradient descent for w with eta_t = 1/(mu_w t) against the best
// response lambda_t; returns the averages over w_1..w_N, lambda_1..lambda_N
// with a certified gap. `w_init` empty means Proj_W(anchor).
SaddleCertificate solve_sc_sc(const RegularizedObjective& obj,
                              std::uint64_t iterations,
                              std::span<const double> w_init = {},
                              const SaddleOptions& options = {});

// Runs the same iteration but certifies the averaged pair at N = 1, 2, 4, ...
// and stops at the first checkpoint with certified gap <= alpha, or at
// min(iterations_for_alpha(alpha), max_iterations), where the theory
// already guarantees an alpha-saddle point (the returned certificate then
// reports whatever gap was measured there).
SaddleCertificate solve_to_alpha(const RegularizedObjective& obj,
                                 double alpha,
                                 std::span<const double> w_init = {},
                                 std::uint64_t max_iterations = 1u << 22);

// (L + mu_w M)^2 (1 + ln N) / (2 mu_w N)
double sc_sc_gap_bound(double lipschitz, double diameter, double mu_w,
                       std::uint64_t iterations);

// Smallest N with sc_sc_gap_bound(L, M, mu_w, N) <= alpha (doubling, then
// bisection). mu_lambda does not enter the bound; it is validated only.
std::uint64_t iterations_for_alpha(double alpha, double mu_w,
                                   double mu_lambda, double lipschitz,
                                   double diameter);

// L^2 / (8 n^2 mu_w) + B^2 / (8 n^2 mu_lambda)
double stability_alpha(double lipschitz, double range_bound, double n,
                       double mu_w, double mu_lambda);

// (3/n) (L/mu_w + B/sqrt(mu_w mu_lambda))
double stability_bound(double lipschitz, double range_bound, double n,
                       double mu_w, double mu_lambda);

struct BaselineResult {
  ParamVector w;
  double mu_w = 0.0;
  double mu_lambda = 0.0;
  std::size_t per_group = 0;
  SaddleCertificate certificate;
};

// Regularized ERM on K/p fresh draws per group with
//   mu_w      = (D/M) sqrt(p/K) sqrt(ln(K/p) ln K)
//   mu_lambda = D sqrt(p ln(K/p) ln K / (K ln p))     (1 when p = 1)
// anchored at the center of W and solved to stability_alpha accuracy.
BaselineResult nonprivate_baseline(SampleOracleSet& oracles, std::uint64_t K,
                                   const LossSpec& loss,
                                   const ParamSpace& space);

// ---- stability probe ---------------------------------------------------------

struct StabilityTrial {
  double distance = 0.0;
  double gap_original = 0.0;
  double gap_neighbor = 0.0;
};

struct StabilityReport {
  std::size_t trials = 0;
  double max_distance = 0.0;
  double mean_distance = 0.0;
  double bound = 0.0;
  double alpha = 0.0;
  std::size_t violations = 0;
  std::vector<StabilityTrial> details;
};

// One random problem: the collection, a neighbor of it and the shared
// objective parameters.
struct StabilityCase {
  DatasetCollection original;
  DatasetCollection neighbor;
  LossSpec loss;
  ParamSpace space;
};

using StabilityCaseBuilder =
    std::function<StabilityCase(std::size_t n, RandomStream& rng)>;

// Random affine collections (p groups, unit feature ball, M = 1, L = B = 1)
// with one uniformly chosen entry replaced by a fresh random point.
StabilityCaseBuilder affine_stability_builder(std::size_t dim,
                                              std::size_t groups);

// For each trial: build a case, solve both collections to
// stability_alpha(L, B, n, mu_w, mu_lambda) and record ||w~ - w~'||.
StabilityReport stability_probe(const StabilityCaseBuilder& builder,
                                std::size_t n, double mu_w, double mu_lambda,
                                std::size_t trials, RandomStream& rng);

}  // namespace wgdp

#endif  // WGDP_SADDLE_HPP_
