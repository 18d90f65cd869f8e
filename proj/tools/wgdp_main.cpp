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


#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wgdp/audits.hpp"
#include "wgdp/errors.hpp"
#include "wgdp/harness.hpp"
#include "wgdp/instance_io.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string eps;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Run a single seed instead of the list");
  cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
  cmd->add_option("--eps", o.eps, "Override epsilon (a number or 'inf')");
}

wgdp::ExperimentConfig resolve(const std::string& path, const Overrides& o) {
  wgdp::ExperimentConfig c = wgdp::load_config(path);
  if (o.seed) c.seeds = {*o.seed};
  if (!o.eps.empty()) wgdp::apply_override(c, "eps", o.eps);
  if (!o.out.empty()) c.output = o.out;
  c.validate();
  return c;
}

void emit(const std::string& csv, const wgdp::ExperimentConfig& c) {
  if (c.output.empty() || c.output == "-") {
    std::cout << csv;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw wgdp::InvalidArgument("cannot write '" + c.output + "'");
  f << csv;
  std::ofstream side(c.output + ".config.json", std::ios::binary);
  side << wgdp::config_to_json(c);
  std::cerr << "wrote " << c.output << '\n';
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wgdp: private worst-group risk minimization experiments"};
  app.require_subcommand(1);

  std::string run_config;
  Overrides run_o;
  auto* run = app.add_subcommand("run", "Run every seed of a configuration");
  run->add_option("--config", run_config, "JSON configuration")->required();
  add_overrides(run, run_o);

  std::string sweep_config, sweep_param = "K", sweep_values;
  Overrides sweep_o;
  auto* sweep = app.add_subcommand("sweep", "Run a configuration over values");
  sweep->add_option("--config", sweep_config, "JSON configuration")
      ->required();
  sweep->add_option("--param", sweep_param, "K | eps | delta | p | d");
  sweep->add_option("--values", sweep_values, "Comma-separated values")
      ->required();
  add_overrides(sweep, sweep_o);

  std::string audit_kind;
  std::size_t audit_trials = 0;
  std::uint64_t audit_seed = 1;
  bool zero_scales = false;
  auto* audit = app.add_subcommand("audit", "Run an invariant audit");
  audit->add_option("--kind", audit_kind, "stability|mechanisms|regret|reduction")
      ->required()
      ->check(CLI::IsMember({"stability", "mechanisms", "regret", "reduction"}));
  audit->add_option("--trials", audit_trials,
                    "Stability trials / EXP3 replays");
  audit->add_option("--seed", audit_seed, "Audit seed");
  audit->add_flag("--zero-scales", zero_scales,
                  "Mechanisms: run every sampler at scale 0");

  std::string inst_config, inst_out;
  auto* inst = app.add_subcommand("instance",
                                  "Write the instance of a configuration");
  inst->add_option("--config", inst_config, "JSON configuration")->required();
  inst->add_option("--out", inst_out, "Output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const wgdp::ExperimentConfig c = resolve(run_config, run_o);
      const wgdp::SuiteResult s = wgdp::run_suite(c);
      emit(wgdp::to_csv(std::span<const wgdp::SuiteResult>(&s, 1)), c);
    } else if (*sweep) {
      const wgdp::ExperimentConfig c = resolve(sweep_config, sweep_o);
      const auto suites = wgdp::run_sweep(c, sweep_param, split(sweep_values));
      emit(wgdp::to_csv(suites), c);
    } else if (*audit) {
      const wgdp::AuditReport r =
          wgdp::run_audit(audit_kind, audit_trials, audit_seed, zero_scales);
      std::cout << wgdp::format_report(r);
      return r.passed() ? 0 : 1;
    } else if (*inst) {
      const wgdp::ExperimentConfig c = wgdp::load_config(inst_config);
      const std::string text =
          wgdp::instance_to_json(wgdp::build_instance(c));
      if (inst_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(inst_out, std::ios::binary);
        f << text;
      }
    }
  } catch (const wgdp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
