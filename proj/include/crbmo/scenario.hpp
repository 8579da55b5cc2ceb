// SPDX-License-Identifier: Apache-2.0
//
// Scenario file format: flat `key = value` text with explicit units in key
// names (angles in degrees at this boundary only). parse_scenario rejects
// unknown keys; serialize_scenario emits every field in canonical order, so
// parse(serialize(s)) == s and the manifest echo replays bit-exactly.

#pragma once

#include <string>

#include "crbmo/simulation.hpp"

namespace crbmo {

Scenario parse_scenario(const std::string& text, const std::string& source_name);
Scenario load_scenario(const std::string& path);

std::string serialize_scenario(const Scenario& scenario);

}  // namespace crbmo
