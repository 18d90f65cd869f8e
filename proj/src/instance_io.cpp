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

#include "wgdp/instance_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "wgdp/errors.hpp"

namespace wgdp {
namespace {

using nlohmann::json;

void only_keys(const json& obj, std::initializer_list<std::string_view> keys,
               const std::string& where) {
  if (!obj.is_object()) throw InvalidArgument(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view k : keys) known = known || key == k;
    if (!known) throw InvalidArgument(where + ": unknown key '" + key + "'");
  }
}

const json& need(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    throw InvalidArgument(where + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_number()) {
    throw InvalidArgument(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

Vector vector_of(const json& v, std::size_t dim, const std::string& where) {
  if (!v.is_array() || v.size() != dim) {
    throw InvalidArgument(where + ": expected an array of length " +
                          std::to_string(dim));
  }
  Vector out;
  out.reserve(dim);
  for (const json& e : v) {
    if (!e.is_number()) throw InvalidArgument(where + ": non-numeric entry");
    out.push_back(e.get<double>());
  }
  return out;
}

json group_to_json(const GroupDistribution& g) {
  if (const auto* par = g.parametric()) {
    return {{"gaussian_features",
             {{"mean", par->mean},
              {"stddev", par->stddev},
              {"feature_bound", par->feature_bound},
              {"scalar", par->scalar},
              {"shift", par->shift}}}};
  }
  json support = json::array();
  const Dataset& s = g.support();
  for (std::size_t j = 0; j < s.size(); ++j) {
    const DataPoint z = s.point(j);
    support.push_back({{"x", z.x},
                       {"s", z.scalar},
                       {"shift", z.shift},
                       {"prob", g.probabilities()[j]}});
  }
  return {{"support", support}};
}

GroupDistribution group_from_json(const json& g, std::size_t dim,
                                  const LossSpec& loss,
                                  const std::string& where) {
  only_keys(g, {"support", "gaussian_features"}, where);
  if (g.contains("support") == g.contains("gaussian_features")) {
    throw InvalidArgument(where +
                          ": exactly one of 'support' or "
                          "'gaussian_features' is required");
  }
  if (g.contains("gaussian_features")) {
    const json& p = g.at("gaussian_features");
    const std::string w = where + ".gaussian_features";
    only_keys(p, {"mean", "stddev", "feature_bound", "scalar", "shift"}, w);
    const double bound = number(p, "feature_bound", w);
    if (bound > loss.lipschitz() * (1.0 + 1e-12)) {
      throw InvalidArgument(w + ": feature_bound exceeds the loss lipschitz");
    }
    return GroupDistribution::gaussian_features(
        vector_of(need(p, "mean", w), dim, w + ".mean"),
        number(p, "stddev", w), bound, number(p, "scalar", w),
        p.contains("shift") ? number(p, "shift", w) : 0.0);
  }
  const json& support = g.at("support");
  if (!support.is_array() || support.empty()) {
    throw InvalidArgument(where + ".support: expected a non-empty array");
  }
  Dataset points(dim);
  Vector probs;
  for (std::size_t j = 0; j < support.size(); ++j) {
    const std::string w = where + ".support[" + std::to_string(j) + "]";
    const json& e = support[j];
    only_keys(e, {"x", "s", "shift", "prob"}, w);
    DataPoint z{vector_of(need(e, "x", w), dim, w + ".x"), number(e, "s", w),
                e.contains("shift") ? number(e, "shift", w) : 0.0};
    loss.check_point(z);
    points.push_back(z);
    probs.push_back(number(e, "prob", w));
  }
  return GroupDistribution::finite(std::move(points), std::move(probs));
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  json groups = json::array();
  for (const GroupDistribution& g : instance.groups) {
    groups.push_back(group_to_json(g));
  }
  json doc = {{"schema", kInstanceSchema},
              {"name", instance.name},
              {"d", instance.dim()},
              {"p", instance.group_count()},
              {"loss",
               {{"kind", to_string(instance.loss.kind())},
                {"lipschitz", instance.loss.lipschitz()},
                {"range_bound", instance.loss.range_bound()}}},
              {"space",
               {{"center", instance.space.center()},
                {"diameter", instance.space.diameter()}}},
              {"groups", groups}};
  if (instance.optimum) {
    doc["optimum"] = {{"value", instance.optimum->value},
                      {"w", instance.optimum->w}};
  }
  return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("instance: ") + e.what());
  }
  const std::string where = "instance";
  only_keys(doc,
            {"schema", "name", "d", "p", "loss", "space", "groups", "optimum"},
            where);
  const json& schema = need(doc, "schema", where);
  if (!schema.is_string() || schema.get<std::string>() != kInstanceSchema) {
    throw InvalidArgument("instance: schema must be \"" +
                          std::string(kInstanceSchema) + "\"");
  }
  const json& dj = need(doc, "d", where);
  const json& pj = need(doc, "p", where);
  if (!dj.is_number_unsigned() || !pj.is_number_unsigned() ||
      dj.get<std::size_t>() == 0 || pj.get<std::size_t>() == 0) {
    throw InvalidArgument("instance: d and p must be positive integers");
  }
  const std::size_t d = dj.get<std::size_t>();
  const std::size_t p = pj.get<std::size_t>();

  const json& lj = need(doc, "loss", where);
  only_keys(lj, {"kind", "lipschitz", "range_bound"}, "instance.loss");
  const json& kind = need(lj, "kind", "instance.loss");
  if (!kind.is_string()) throw InvalidArgument("instance.loss.kind: string");
  LossSpec loss(loss_kind_from_string(kind.get<std::string>()),
                number(lj, "lipschitz", "instance.loss"),
                number(lj, "range_bound", "instance.loss"));

  const json& sj = need(doc, "space", where);
  only_keys(sj, {"center", "diameter"}, "instance.space");
  ParamSpace space(vector_of(need(sj, "center", "instance.space"), d,
                             "instance.space.center"),
                   number(sj, "diameter", "instance.space"));

  const json& gj = need(doc, "groups", where);
  if (!gj.is_array() || gj.size() != p) {
    throw InvalidArgument("instance.groups: expected p entries");
  }
  std::vector<GroupDistribution> groups;
  for (std::size_t i = 0; i < p; ++i) {
    groups.push_back(group_from_json(
        gj[i], d, loss, "instance.groups[" + std::to_string(i) + "]"));
  }

  std::optional<AnalyticOptimum> optimum;
  if (doc.contains("optimum")) {
    const json& oj = doc.at("optimum");
    only_keys(oj, {"value", "w"}, "instance.optimum");
    optimum = AnalyticOptimum{
        number(oj, "value", "instance.optimum"),
        vector_of(need(oj, "w", "instance.optimum"), d, "instance.optimum.w")};
  }
  std::string name = "instance";
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) {
      throw InvalidArgument("instance.name: expected a string");
    }
    name = doc.at("name").get<std::string>();
  }
  return Instance{std::move(name), loss, std::move(space), std::move(groups),
                  std::move(optimum)};
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << instance_to_json(instance);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace wgdp
