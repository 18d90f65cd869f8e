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


#include "wgdp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "wgdp/errors.hpp"
#include "wgdp/instance_io.hpp"
#include "wgdp/online.hpp"
#include "wgdp/phased_erm.hpp"
#include "wgdp/saddle.hpp"

namespace wgdp {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw InvalidArgument(where + ": unknown key '" + item.key() + "'");
    }
  }
}

double parse_epsilon(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return kInfinity;
    throw InvalidArgument("epsilon: expected a number or \"inf\"");
  }
  if (!j.is_number()) throw InvalidArgument("epsilon: expected a number");
  return j.get<double>();
}

template <typename T>
T get_as(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(where + "." + key + ": " + e.what());
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidArgument(what + ": not an unsigned integer: '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "infinity") return kInfinity;
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidArgument(what + ": not a number: '" + text + "'");
  }
  return v;
}

Instance build_base(const std::string& kind, const ExperimentConfig& c,
                    RandomStream& rng) {
  const InstanceConfig& ic = c.instance;
  if (kind == "two-point") return build_two_point_instance();
  if (kind == "random-affine") {
    return random_affine_instance(c.d, c.p, ic.support, ic.diameter, rng);
  }
  if (kind == "random-hinge") {
    return random_hinge_instance(c.d, c.p, ic.support, ic.diameter, rng);
  }
  throw InvalidArgument("unknown instance kind '" + kind + "'");
}

bool all_finite(const Instance& instance) {
  for (const auto& g : instance.groups) {
    if (!g.has_finite_support()) return false;
  }
  return true;
}

// Grid over W: evenly spaced on the segment for d = 1, the in-ball points of
// a square lattice for d = 2. Returns the spacing.
double grid_points(const ParamSpace& space, std::vector<Vector>& out) {
  const Vector& c = space.center();
  const double r = space.radius();
  out.clear();
  if (space.dim() == 1) {
    const std::size_t n = kGridPoints;
    const double h = 2.0 * r / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      out.push_back({c[0] - r + h * static_cast<double>(k)});
    }
    return h;
  }
  const std::size_t side = static_cast<std::size_t>(
      std::lround(std::sqrt(static_cast<double>(kGridPoints))));
  const double h = 2.0 * r / static_cast<double>(side - 1);
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      Vector w{c[0] - r + h * static_cast<double>(a),
               c[1] - r + h * static_cast<double>(b)};
      if (space.contains(w)) out.push_back(std::move(w));
    }
  }
  return h;
}

template <typename RiskFn>
double grid_minimum(const ParamSpace& space, RiskFn&& risk, double& spacing) {
  std::vector<Vector> pts;
  spacing = grid_points(space, pts);
  double best = kInfinity;
  for (const Vector& w : pts) best = std::min(best, risk(w));
  return best;
}

double grid_tolerance(const Instance& instance, double spacing) {
  // Every point of W is within spacing * sqrt(d) of a lattice point (the
  // d = 2 boundary included, by a margin).
  return instance.loss.lipschitz() * spacing *
         std::sqrt(static_cast<double>(instance.dim()));
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return s;
}

}  // namespace

// ---- enums ---------------------------------------------------------------------

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPhasedErm: return "phased-erm";
    case Algorithm::kOcoGame: return "oco-game";
    case Algorithm::kMgr: return "mgr";
    case Algorithm::kAgs: return "ags";
    case Algorithm::kNonprivateBaseline: return "nonprivate-baseline";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  for (Algorithm a : {Algorithm::kPhasedErm, Algorithm::kOcoGame,
                      Algorithm::kMgr, Algorithm::kAgs,
                      Algorithm::kNonprivateBaseline}) {
    if (to_string(a) == name) return a;
  }
  throw InvalidArgument("unknown algorithm '" + name + "'");
}

std::string to_string(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::kAuto: return "auto";
    case BaselineMode::kAnalytic: return "analytic";
    case BaselineMode::kGrid: return "grid";
    case BaselineMode::kNonprivate: return "nonprivate";
  }
  return "unknown";
}

BaselineMode baseline_mode_from_string(const std::string& name) {
  for (BaselineMode m : {BaselineMode::kAuto, BaselineMode::kAnalytic,
                         BaselineMode::kGrid, BaselineMode::kNonprivate}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown baseline mode '" + name + "'");
}

// ---- config --------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (K < 1) throw InvalidArgument("config: K must be >= 1");
  if (p < 1) throw InvalidArgument("config: p must be >= 1");
  if (d < 1) throw InvalidArgument("config: d must be >= 1");
  PrivacyBudget{epsilon, delta}.validate();
  if (seeds.empty()) throw InvalidArgument("config: seeds is empty");
  if (evaluation.n_eval < 1) throw InvalidArgument("config: n_eval >= 1");
  if (!(solver.kappa > 0.0 && solver.kappa < 1.0)) {
    throw InvalidArgument("config: kappa must lie in (0, 1)");
  }
  const RateMultipliers& m = solver.multipliers;
  if (!(m.rounds > 0.0) || !(m.eta_w > 0.0) || !(m.eta_lambda >= 0.0)) {
    throw InvalidArgument("config: rate multipliers must be positive");
  }
  if (solver.eta && !(*solver.eta > 0.0)) {
    throw InvalidArgument("config: eta must be positive");
  }
  if (solver.rounds && *solver.rounds < 1) {
    throw InvalidArgument("config: rounds must be >= 1");
  }
  const std::string& k = instance.kind;
  if (k != "two-point" && k != "random-affine" && k != "random-hinge" &&
      k != "hard" && k != "file") {
    throw InvalidArgument("config: unknown instance kind '" + k + "'");
  }
  if (k == "file" && instance.path.empty()) {
    throw InvalidArgument("config: file instance needs a path");
  }
  if (k == "hard") {
    if (instance.base == "hard" || instance.base == "file") {
      throw InvalidArgument("config: hard base must be a generated kind");
    }
    if (instance.reduction != "population" &&
        instance.reduction != "empirical") {
      throw InvalidArgument("config: reduction must be population|empirical");
    }
    if (instance.hard_n < 1) throw InvalidArgument("config: hard_n >= 1");
  }
  if (!(instance.diameter > 0.0)) {
    throw InvalidArgument("config: diameter must be positive");
  }
  if (instance.support < 1) throw InvalidArgument("config: support >= 1");
  if (evaluation.mode == EvalMode::kEmpirical &&
      algorithm != Algorithm::kMgr && algorithm != Algorithm::kAgs) {
    throw InvalidArgument(
        "config: empirical evaluation needs an offline solver (mgr, ags)");
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  check_keys(j, {"schema", "algorithm", "instance", "K", "p", "d", "epsilon",
                 "delta", "seeds", "evaluation", "solver", "output",
                 "timing"},
             "config");
  if (j.contains("schema") &&
      get_as<std::string>(j, "schema", "config") != kConfigSchema) {
    throw InvalidArgument("config: unsupported schema");
  }
  ExperimentConfig c;
  c.algorithm =
      algorithm_from_string(get_as<std::string>(j, "algorithm", "config"));
  if (j.contains("instance")) {
    const json& ji = j.at("instance");
    check_keys(ji, {"kind", "support", "diameter", "seed", "base",
                    "reduction", "n", "path"},
               "instance");
    InstanceConfig& ic = c.instance;
    ic.kind = get_as<std::string>(ji, "kind", "instance");
    if (ji.contains("support")) {
      ic.support = get_as<std::size_t>(ji, "support", "instance");
    }
    if (ji.contains("diameter")) {
      ic.diameter = get_as<double>(ji, "diameter", "instance");
    }
    if (ji.contains("seed")) {
      ic.seed = get_as<std::uint64_t>(ji, "seed", "instance");
    }
    if (ji.contains("base")) {
      ic.base = get_as<std::string>(ji, "base", "instance");
    }
    if (ji.contains("reduction")) {
      ic.reduction = get_as<std::string>(ji, "reduction", "instance");
    }
    if (ji.contains("n")) ic.hard_n = get_as<std::size_t>(ji, "n", "instance");
    if (ji.contains("path")) {
      ic.path = get_as<std::string>(ji, "path", "instance");
    }
  }
  if (j.contains("K")) c.K = get_as<std::uint64_t>(j, "K", "config");
  if (j.contains("p")) c.p = get_as<std::size_t>(j, "p", "config");
  if (j.contains("d")) c.d = get_as<std::size_t>(j, "d", "config");
  if (j.contains("epsilon")) c.epsilon = parse_epsilon(j.at("epsilon"));
  if (j.contains("delta")) c.delta = get_as<double>(j, "delta", "config");
  if (j.contains("seeds")) {
    c.seeds = get_as<std::vector<std::uint64_t>>(j, "seeds", "config");
  }
  if (j.contains("evaluation")) {
    const json& je = j.at("evaluation");
    check_keys(je, {"mode", "baseline", "n_eval"}, "evaluation");
    if (je.contains("mode")) {
      const std::string m = get_as<std::string>(je, "mode", "evaluation");
      if (m == "population") {
        c.evaluation.mode = EvalMode::kPopulation;
      } else if (m == "empirical") {
        c.evaluation.mode = EvalMode::kEmpirical;
      } else {
        throw InvalidArgument("evaluation.mode: population|empirical");
      }
    }
    if (je.contains("baseline")) {
      c.evaluation.baseline = baseline_mode_from_string(
          get_as<std::string>(je, "baseline", "evaluation"));
    }
    if (je.contains("n_eval")) {
      c.evaluation.n_eval = get_as<std::size_t>(je, "n_eval", "evaluation");
    }
  }
  if (j.contains("solver")) {
    const json& js = j.at("solver");
    check_keys(js, {"eta", "rounds", "rate_multipliers", "kappa"}, "solver");
    if (js.contains("eta") && !js.at("eta").is_null()) {
      c.solver.eta = get_as<double>(js, "eta", "solver");
    }
    if (js.contains("rounds") && !js.at("rounds").is_null()) {
      c.solver.rounds = get_as<std::uint64_t>(js, "rounds", "solver");
    }
    if (js.contains("rate_multipliers")) {
      const json& jm = js.at("rate_multipliers");
      check_keys(jm, {"rounds", "eta_w", "eta_lambda"}, "rate_multipliers");
      RateMultipliers& m = c.solver.multipliers;
      if (jm.contains("rounds")) {
        m.rounds = get_as<double>(jm, "rounds", "rate_multipliers");
      }
      if (jm.contains("eta_w")) {
        m.eta_w = get_as<double>(jm, "eta_w", "rate_multipliers");
      }
      if (jm.contains("eta_lambda")) {
        m.eta_lambda = get_as<double>(jm, "eta_lambda", "rate_multipliers");
      }
    }
    if (js.contains("kappa")) c.solver.kappa = get_as<double>(js, "kappa", "solver");
  }
  if (j.contains("output")) c.output = get_as<std::string>(j, "output", "config");
  if (j.contains("timing")) c.timing = get_as<bool>(j, "timing", "config");
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  j["algorithm"] = to_string(c.algorithm);
  json ji;
  ji["kind"] = c.instance.kind;
  ji["support"] = c.instance.support;
  ji["diameter"] = c.instance.diameter;
  ji["seed"] = c.instance.seed;
  ji["base"] = c.instance.base;
  ji["reduction"] = c.instance.reduction;
  ji["n"] = c.instance.hard_n;
  ji["path"] = c.instance.path;
  j["instance"] = ji;
  j["K"] = c.K;
  j["p"] = c.p;
  j["d"] = c.d;
  if (std::isinf(c.epsilon)) {
    j["epsilon"] = "inf";
  } else {
    j["epsilon"] = c.epsilon;
  }
  j["delta"] = c.delta;
  j["seeds"] = c.seeds;
  j["evaluation"] = {
      {"mode",
       c.evaluation.mode == EvalMode::kPopulation ? "population" : "empirical"},
      {"baseline", to_string(c.evaluation.baseline)},
      {"n_eval", c.evaluation.n_eval}};
  json js;
  js["eta"] = c.solver.eta ? json(*c.solver.eta) : json(nullptr);
  js["rounds"] = c.solver.rounds ? json(*c.solver.rounds) : json(nullptr);
  js["rate_multipliers"] = {{"rounds", c.solver.multipliers.rounds},
                            {"eta_w", c.solver.multipliers.eta_w},
                            {"eta_lambda", c.solver.multipliers.eta_lambda}};
  js["kappa"] = c.solver.kappa;
  j["solver"] = js;
  j["output"] = c.output;
  j["timing"] = c.timing;
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

Instance build_instance(const ExperimentConfig& config) {
  const InstanceConfig& ic = config.instance;
  RandomStream rng(ic.seed);
  Instance inst = [&]() {
    if (ic.kind == "file") return load_instance(ic.path);
    if (ic.kind == "hard") {
      RandomStream base_rng = rng.child(0);
      RandomStream hard_rng = rng.child(1);
      const Instance base = build_base(ic.base, config, base_rng);
      return build_hard_instance(base,
                                 ic.reduction == "empirical"
                                     ? ReductionMode::kEmpirical
                                     : ReductionMode::kPopulation,
                                 ic.hard_n, hard_rng);
    }
    return build_base(ic.kind, config, rng);
  }();
  if (inst.dim() != config.d || inst.group_count() != config.p) {
    throw InvalidArgument("instance '" + inst.name + "' has d=" +
                          std::to_string(inst.dim()) + ", p=" +
                          std::to_string(inst.group_count()) +
                          " but the config says d=" +
                          std::to_string(config.d) +
                          ", p=" + std::to_string(config.p));
  }
  return inst;
}

// ---- evaluation ----------------------------------------------------------------

RiskEstimate population_worst_group_risk(const Instance& instance,
                                         std::span<const double> w,
                                         std::size_t n_eval,
                                         RandomStream& rng) {
  RiskEstimate worst{-kInfinity, 0.0};
  for (std::size_t i = 0; i < instance.groups.size(); ++i) {
    const GroupDistribution& g = instance.groups[i];
    const RiskEstimate r =
        g.has_finite_support()
            ? population_risk_exact(g, w, instance.loss)
            : population_risk_monte_carlo(g, w, instance.loss, n_eval, rng);
    if (r.value > worst.value) worst = r;
  }
  return worst;
}

Baseline compute_baseline(const Instance& instance, BaselineMode mode,
                          std::uint64_t K, std::size_t n_eval,
                          RandomStream& rng) {
  const bool grid_ok = instance.dim() <= 2 && all_finite(instance);
  if (mode == BaselineMode::kAuto) {
    mode = instance.optimum ? BaselineMode::kAnalytic
           : grid_ok        ? BaselineMode::kGrid
                            : BaselineMode::kNonprivate;
  }
  Baseline b;
  b.mode = to_string(mode);
  switch (mode) {
    case BaselineMode::kAnalytic:
      if (!instance.optimum) {
        throw UnsupportedMode("instance '" + instance.name +
                              "' has no analytic optimum");
      }
      b.value = instance.optimum->value;
      return b;
    case BaselineMode::kGrid: {
      if (!grid_ok) {
        throw UnsupportedMode(
            "grid baseline needs d <= 2 and finite group supports");
      }
      double spacing = 0.0;
      b.value = grid_minimum(
          instance.space,
          [&](const Vector& w) {
            return worst_group_risk(instance.groups, w, instance.loss).value;
          },
          spacing);
      b.tolerance = grid_tolerance(instance, spacing);
      return b;
    }
    case BaselineMode::kNonprivate: {
      const std::uint64_t budget = 4 * K;
      SampleOracleSet oracles(instance.groups, budget, rng.child(0));
      const BaselineResult ref =
          nonprivate_baseline(oracles, budget, instance.loss, instance.space);
      RandomStream eval_rng = rng.child(1);
      const RiskEstimate r =
          population_worst_group_risk(instance, ref.w, n_eval, eval_rng);
      b.value = r.value;
      b.tolerance = r.std_error;
      return b;
    }
    case BaselineMode::kAuto:
      break;
  }
  throw UnsupportedMode("unresolved baseline mode");
}

ExcessEstimate estimate_excess_risk(std::span<const double> w_out,
                                    const Instance& instance,
                                    const Baseline& baseline,
                                    std::size_t n_eval, RandomStream& rng) {
  if (w_out.size() != instance.dim()) {
    throw InvalidArgument("estimate_excess_risk: dimension mismatch");
  }
  ExcessEstimate e;
  RandomStream raw_rng = rng.child(0);
  RandomStream proj_rng = rng.child(1);
  e.risk_raw =
      population_worst_group_risk(instance, w_out, n_eval, raw_rng).value;
  const Vector w = instance.space.project(w_out);
  const RiskEstimate r =
      population_worst_group_risk(instance, w, n_eval, proj_rng);
  e.risk_projected = r.value;
  e.std_error = r.std_error;
  e.baseline = baseline.value;
  e.baseline_mode = baseline.mode;
  e.excess = e.risk_projected - baseline.value;
  return e;
}

ExcessEstimate estimate_excess_risk(std::span<const double> w_out,
                                    const Instance& instance,
                                    BaselineMode baseline_mode,
                                    std::uint64_t K, std::size_t n_eval,
                                    RandomStream& rng) {
  RandomStream base_rng = rng.child(7);
  const Baseline b =
      compute_baseline(instance, baseline_mode, K, n_eval, base_rng);
  return estimate_excess_risk(w_out, instance, b, n_eval, rng);
}

ExcessEstimate estimate_empirical_excess_risk(std::span<const double> w_out,
                                              const DatasetCollection& data,
                                              const Instance& instance) {
  if (w_out.size() != data.dim()) {
    throw InvalidArgument("estimate_empirical_excess_risk: dim mismatch");
  }
  ExcessEstimate e;
  e.risk_raw = worst_group_risk(data, w_out, instance.loss).value;
  const Vector w = instance.space.project(w_out);
  e.risk_projected = worst_group_risk(data, w, instance.loss).value;
  if (instance.deterministic() && instance.optimum) {
    e.baseline = instance.optimum->value;
    e.baseline_mode = "analytic";
  } else if (data.dim() <= 2) {
    double spacing = 0.0;
    e.baseline = grid_minimum(
        instance.space,
        [&](const Vector& v) {
          return worst_group_risk(data, v, instance.loss).value;
        },
        spacing);
    e.baseline_mode = "grid";
  } else {
    throw UnsupportedMode(
        "empirical baseline needs d <= 2 or a deterministic instance");
  }
  e.excess = e.risk_projected - e.baseline;
  return e;
}

// ---- trials --------------------------------------------------------------------

TrialResult run_trial(const ExperimentConfig& config, const Instance& instance,
                      const Baseline& baseline, std::uint64_t seed) {
  TrialResult tr;
  tr.seed = seed;
  tr.baseline = baseline.value;
  const RandomStream root(seed);
  SampleOracleSet oracles(instance.groups, config.K, root.child(0));
  RandomStream algo_rng = root.child(1);
  RandomStream eval_rng = root.child(2);
  const LossSpec& loss = instance.loss;
  const ParamSpace& space = instance.space;
  const std::size_t p = instance.group_count();
  const std::size_t d = instance.dim();
  const double eps = config.epsilon;
  const double delta = config.delta;
  const auto start = std::chrono::steady_clock::now();
  try {
    Vector w;
    std::optional<DatasetCollection> data;
    bool capped = false;
    switch (config.algorithm) {
      case Algorithm::kPhasedErm: {
        const double big_d = loss.scale();
        const double eta =
            config.solver.eta.value_or(default_eta(space.diameter(), big_d,
                                                   config.K, p, eps, delta, d));
        const PhasedSchedule schedule =
            make_schedule(config.K, p, eta, loss.lipschitz(),
                          loss.range_bound(), big_d, eps, delta);
        w = run_phased_erm(oracles, schedule, loss, space, algo_rng).w;
        break;
      }
      case Algorithm::kOcoGame: {
        GameConfig game =
            make_game_config(config.K, p, d, loss, space, {eps, delta});
        if (config.solver.eta) game.eta_ftrl = *config.solver.eta;
        w = run_oco_game(oracles, game, loss, space, algo_rng).w_bar;
        break;
      }
      case Algorithm::kMgr: {
        data = oracles.draw_collection(static_cast<std::size_t>(config.K / p));
        const MgrConfig cfg =
            config.solver.rounds
                ? mgr_params_for_rounds(config.K, p, d, space.diameter(),
                                        loss.lipschitz(), loss.range_bound(),
                                        eps, delta, *config.solver.rounds,
                                        config.solver.multipliers)
                : mgr_default_params(config.K, p, d, space.diameter(),
                                     loss.lipschitz(), loss.range_bound(),
                                     eps, delta, config.solver.multipliers);
        capped = cfg.rounds_capped;
        w = run_mgr(*data, cfg, loss, space, algo_rng).w_bar;
        break;
      }
      case Algorithm::kAgs: {
        data = oracles.draw_collection(static_cast<std::size_t>(config.K / p));
        const AgsConfig cfg =
            config.solver.rounds
                ? ags_params_for_rounds(config.K, p, d, space.diameter(),
                                        loss.lipschitz(), loss.range_bound(),
                                        eps, delta, *config.solver.rounds,
                                        config.solver.kappa)
                : ags_default_params(config.K, p, d, space.diameter(),
                                     loss.lipschitz(), loss.range_bound(),
                                     eps, delta, config.solver.kappa);
        capped = cfg.rounds_capped;
        w = run_ags(*data, cfg, loss, space, algo_rng).w_bar;
        break;
      }
      case Algorithm::kNonprivateBaseline:
        w = nonprivate_baseline(oracles, config.K, loss, space).w;
        break;
    }
    if (config.timing) {
      tr.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    }
    const ExcessEstimate e =
        config.evaluation.mode == EvalMode::kEmpirical
            ? estimate_empirical_excess_risk(w, *data, instance)
            : estimate_excess_risk(w, instance, baseline,
                                   config.evaluation.n_eval, eval_rng);
    tr.risk_raw = e.risk_raw;
    tr.risk_projected = e.risk_projected;
    tr.baseline = e.baseline;
    tr.excess = e.excess;
    tr.status = capped ? "ok:rounds_capped" : "ok";
  } catch (const std::exception& ex) {
    tr.status = std::string("error:") + sanitize(ex.what());
  }
  tr.draws_used = oracles.draws_used();
  return tr;
}

SuiteSummary summarize(std::span<const TrialResult> trials) {
  SuiteSummary s;
  double sum_sq = 0.0;
  for (const TrialResult& t : trials) {
    s.max_draws = std::max(s.max_draws, t.draws_used);
    if (!t.ok()) continue;
    ++s.ok;
    s.mean_risk_raw += t.risk_raw;
    s.mean_risk_projected += t.risk_projected;
    s.mean_excess += t.excess;
    s.mean_baseline += t.baseline;
  }
  if (s.ok == 0) return s;
  const double k = static_cast<double>(s.ok);
  s.mean_risk_raw /= k;
  s.mean_risk_projected /= k;
  s.mean_excess /= k;
  s.mean_baseline /= k;
  for (const TrialResult& t : trials) {
    if (!t.ok()) continue;
    const double dev = t.excess - s.mean_excess;
    sum_sq += dev * dev;
  }
  if (s.ok > 1) s.se_excess = std::sqrt(sum_sq / (k - 1.0) / k);
  return s;
}

SuiteResult run_suite(const ExperimentConfig& config) {
  config.validate();
  SuiteResult out;
  out.config = config;
  const Instance instance = build_instance(config);
  if (config.evaluation.mode == EvalMode::kPopulation) {
    RandomStream base_rng(RandomStream::derive_seed(config.instance.seed, 99));
    out.baseline = compute_baseline(instance, config.evaluation.baseline,
                                    config.K, config.evaluation.n_eval,
                                    base_rng);
  }
  for (std::uint64_t seed : config.seeds) {
    out.trials.push_back(run_trial(config, instance, out.baseline, seed));
  }
  out.summary = summarize(out.trials);
  return out;
}

void apply_override(ExperimentConfig& config, const std::string& param,
                    const std::string& value) {
  if (param == "K") {
    config.K = parse_u64(value, "K");
  } else if (param == "eps" || param == "epsilon") {
    config.epsilon = parse_real(value, "eps");
  } else if (param == "delta") {
    config.delta = parse_real(value, "delta");
  } else if (param == "p") {
    config.p = static_cast<std::size_t>(parse_u64(value, "p"));
  } else if (param == "d") {
    config.d = static_cast<std::size_t>(parse_u64(value, "d"));
  } else if (param == "seed") {
    config.seeds = {parse_u64(value, "seed")};
  } else {
    throw InvalidArgument("unknown sweep parameter '" + param + "'");
  }
}

std::vector<SuiteResult> run_sweep(const ExperimentConfig& config,
                                   const std::string& param,
                                   const std::vector<std::string>& values) {
  if (values.empty()) throw InvalidArgument("sweep: no values");
  std::vector<SuiteResult> out;
  for (const std::string& v : values) {
    ExperimentConfig point = config;
    apply_override(point, param, v);
    out.push_back(run_suite(point));
  }
  return out;
}

// ---- CSV -----------------------------------------------------------------------

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("format_double failed");
  return std::string(buf, ptr);
}

std::string csv_header() {
  return "schema_version,algo,instance,d,p,K,eps,delta,seed,risk_raw,"
         "risk_projected,baseline,excess,draws_used,wall_ms,status\n";
}

namespace {

std::string row_prefix(const ExperimentConfig& c, const std::string& name) {
  std::ostringstream o;
  o << kCsvSchemaVersion << ',' << to_string(c.algorithm) << ','
    << sanitize(name) << ',' << c.d << ',' << c.p << ',' << c.K << ','
    << format_double(c.epsilon) << ',' << format_double(c.delta) << ',';
  return o.str();
}

std::string instance_label(const ExperimentConfig& c) {
  if (c.instance.kind == "file") return "file:" + c.instance.path;
  if (c.instance.kind == "hard") {
    return "hard(" + c.instance.base + "," + c.instance.reduction + ")";
  }
  return c.instance.kind;
}

}  // namespace

std::string csv_rows(const SuiteResult& suite) {
  const std::string prefix =
      row_prefix(suite.config, instance_label(suite.config));
  std::string out;
  for (const TrialResult& t : suite.trials) {
    out += prefix + std::to_string(t.seed) + ',';
    if (t.ok()) {
      out += format_double(t.risk_raw) + ',' +
             format_double(t.risk_projected) + ',' +
             format_double(t.baseline) + ',' + format_double(t.excess);
    } else {
      out += ",," + format_double(t.baseline) + ',';
    }
    out += ',' + std::to_string(t.draws_used) + ',';
    if (t.wall_ms) out += format_double(*t.wall_ms);
    out += ',' + t.status + '\n';
  }
  const SuiteSummary& s = suite.summary;
  out += prefix + "summary,";
  if (s.ok > 0) {
    out += format_double(s.mean_risk_raw) + ',' +
           format_double(s.mean_risk_projected) + ',' +
           format_double(s.mean_baseline) + ',' +
           format_double(s.mean_excess);
  } else {
    out += ",," + format_double(suite.baseline.value) + ',';
  }
  out += ',' + std::to_string(s.max_draws) + ',';
  if (suite.config.timing) {
    double total = 0.0;
    for (const TrialResult& t : suite.trials) total += t.wall_ms.value_or(0.0);
    out += format_double(total / static_cast<double>(suite.trials.size()));
  }
  out += ",se=" + format_double(s.se_excess);
  const std::size_t failed = suite.trials.size() - s.ok;
  if (failed > 0) out += ";failed=" + std::to_string(failed);
  out += '\n';
  return out;
}

std::string to_csv(std::span<const SuiteResult> suites) {
  std::string out = csv_header();
  for (const SuiteResult& s : suites) out += csv_rows(s);
  return out;
}

}  // namespace wgdp
