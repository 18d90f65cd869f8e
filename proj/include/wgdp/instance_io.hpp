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

// Plain-text instance files. Schema "wgdp-instance/1", documented in
// docs/instance-schema.md. Doubles are written in shortest round-trip form,
// so save -> load -> save is byte-stable.

#ifndef WGDP_INSTANCE_IO_HPP_
#define WGDP_INSTANCE_IO_HPP_

#include <string>

#include "wgdp/problem.hpp"

namespace wgdp {

inline constexpr const char* kInstanceSchema = "wgdp-instance/1";

std::string instance_to_json(const Instance& instance);
// Throws InvalidArgument on schema errors (unknown keys included).
Instance instance_from_json(const std::string& text);

void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace wgdp

#endif  // WGDP_INSTANCE_IO_HPP_
