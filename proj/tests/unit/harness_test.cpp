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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wgdp/audits.hpp"
#include "wgdp/errors.hpp"
#include "wgdp/harness.hpp"

namespace wgdp {
namespace {

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ExperimentConfig two_point_config(Algorithm a, std::uint64_t K) {
  ExperimentConfig c;
  c.algorithm = a;
  c.K = K;
  return c;
}

TEST(Excess, TwoPointExamples) {
  const Instance inst = build_two_point_instance();
  RandomStream r(1);
  const Baseline b = compute_baseline(inst, BaselineMode::kAuto, 64, 100, r);
  EXPECT_EQ(b.mode, "analytic");
  EXPECT_EQ(b.value, 1.0);
  const ExcessEstimate at0 = estimate_excess_risk(std::vector{0.0}, inst, b, 100, r);
  EXPECT_EQ(at0.excess, 0.0);
  EXPECT_EQ(at0.std_error, 0.0);
  const ExcessEstimate at_half =
      estimate_excess_risk(std::vector{0.5}, inst, b, 100, r);
  EXPECT_DOUBLE_EQ(at_half.excess, 0.5);
  const ExcessEstimate outside =
      estimate_excess_risk(std::vector{3.0}, inst, b, 100, r);
  EXPECT_DOUBLE_EQ(outside.risk_raw, 4.0);
  EXPECT_DOUBLE_EQ(outside.risk_projected, 2.0);
  EXPECT_DOUBLE_EQ(outside.excess, 1.0);
}

TEST(Baseline, GridIsCloseToAnalytic) {
  const Instance inst = build_two_point_instance();
  RandomStream r(2);
  const Baseline g = compute_baseline(inst, BaselineMode::kGrid, 64, 100, r);
  EXPECT_EQ(g.mode, "grid");
  EXPECT_GE(g.value, 1.0);
  EXPECT_LE(g.value - 1.0, g.tolerance);
}

TEST(Baseline, AnalyticUnavailableThrows) {
  RandomStream g(3);
  const Instance inst = random_affine_instance(1, 2, 4, 2.0, g);
  RandomStream r(4);
  EXPECT_THROW(compute_baseline(inst, BaselineMode::kAnalytic, 64, 100, r),
               UnsupportedMode);
  EXPECT_EQ(compute_baseline(inst, BaselineMode::kAuto, 64, 100, r).mode, "grid");
}

TEST(Suite, OneSeedGivesOneRowAndSummary) {
  ExperimentConfig c = two_point_config(Algorithm::kPhasedErm, 256);
  const SuiteResult s = run_suite(c);
  ASSERT_EQ(s.trials.size(), 1u);
  EXPECT_TRUE(s.trials[0].ok());
  const std::string rows = csv_rows(s);
  EXPECT_EQ(count_lines(rows), 2u);
  EXPECT_NE(rows.find("summary"), std::string::npos);
  EXPECT_EQ(s.summary.ok, 1u);
  EXPECT_DOUBLE_EQ(s.summary.mean_excess, s.trials[0].excess);
}

TEST(Suite, ReplayIsBitIdentical) {
  for (Algorithm a : {Algorithm::kPhasedErm, Algorithm::kOcoGame,
                      Algorithm::kMgr, Algorithm::kAgs}) {
    ExperimentConfig c = two_point_config(a, 512);
    c.seeds = {3, 4, 5};
    const std::vector<SuiteResult> s1{run_suite(c)};
    const std::vector<SuiteResult> s2{run_suite(c)};
    EXPECT_EQ(to_csv(s1), to_csv(s2)) << to_string(a);
    for (const TrialResult& t : s1[0].trials) {
      EXPECT_LE(t.draws_used, c.K) << to_string(a);
      EXPECT_TRUE(t.ok()) << t.status;
    }
  }
}

TEST(Suite, SolverErrorIsRecordedInRow) {
  ExperimentConfig c = two_point_config(Algorithm::kPhasedErm, 2);
  const SuiteResult s = run_suite(c);
  ASSERT_EQ(s.trials.size(), 1u);
  EXPECT_FALSE(s.trials[0].ok());
  EXPECT_EQ(s.trials[0].status.rfind("error:", 0), 0u);
  EXPECT_EQ(s.trials[0].status.find(','), std::string::npos);
  EXPECT_EQ(s.summary.ok, 0u);
}

TEST(Sweep, OneSuitePerValue) {
  ExperimentConfig c = two_point_config(Algorithm::kPhasedErm, 128);
  const auto suites = run_sweep(c, "K", {"128", "256", "512"});
  ASSERT_EQ(suites.size(), 3u);
  EXPECT_EQ(suites[2].config.K, 512u);
  const std::string csv = to_csv(suites);
  EXPECT_EQ(count_lines(csv), 1u + 3u * 2u);
  EXPECT_EQ(csv.rfind(csv_header(), 0), 0u);
  EXPECT_THROW(run_sweep(c, "colour", {"1"}), InvalidArgument);
}

TEST(Config, RoundTripAndStrictness) {
  const std::string text = R"({"schema":"wgdp-config/1","algorithm":"mgr",
    "instance":{"kind":"random-affine","support":4,"seed":11},
    "K":2048,"p":3,"d":2,"epsilon":"inf","delta":1e-6,"seeds":[1,2],
    "evaluation":{"mode":"population","baseline":"grid","n_eval":500},
    "solver":{"rounds":100,"rate_multipliers":{"eta_w":2}}})";
  const ExperimentConfig c = config_from_json(text);
  EXPECT_EQ(c.algorithm, Algorithm::kMgr);
  EXPECT_TRUE(std::isinf(c.epsilon));
  EXPECT_EQ(c.instance.support, 4u);
  EXPECT_EQ(*c.solver.rounds, 100u);
  EXPECT_EQ(c.solver.multipliers.eta_w, 2.0);
  const ExperimentConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_THROW(config_from_json(R"({"algorithm":"mgr","colour":1})"),
               InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"instance":{"kind":"two-point","x":1}})"),
               InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"algorithm":"nope"})"), InvalidArgument);
}

TEST(Config, OverridesApply) {
  ExperimentConfig c;
  apply_override(c, "eps", "inf");
  EXPECT_TRUE(std::isinf(c.epsilon));
  apply_override(c, "K", "4096");
  EXPECT_EQ(c.K, 4096u);
  apply_override(c, "seed", "9");
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{9});
  EXPECT_THROW(apply_override(c, "K", "abc"), InvalidArgument);
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(kInfinity), "inf");
  EXPECT_EQ(format_double(-kInfinity), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Audit, KindsRunAndUnknownThrows) {
  const AuditReport red = run_audit("reduction", 0, 1);
  EXPECT_TRUE(red.passed());
  EXPECT_THROW(run_audit("nonsense", 1, 1), InvalidArgument);
}

TEST(Audit, ZeroScalesEmitNoNoise) {
  const AuditReport rep = run_audit("mechanisms", 0, 1, /*zero_scales=*/true);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.violations(), 0u);
}

}  // namespace
}  // namespace wgdp
