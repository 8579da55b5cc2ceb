// SPDX-License-Identifier: Apache-2.0
//
// Text serialization of a combiner: geometry, mask layout descriptor, and
// per-snapshot phase matrices in radians at 17 significant digits. The
// round trip is bit-exact because phases are the stored representation.

#pragma once

#include <string>

#include "crbmo/array_geometry.hpp"
#include "crbmo/combiner.hpp"

namespace crbmo {

std::string serialize_combiner(const UpaGeometry& geom, const CombinerSet& combiners);
void save_combiner(const std::string& path, const UpaGeometry& geom,
                   const CombinerSet& combiners);

struct LoadedCombiner {
  UpaGeometry geom;
  CombinerSet combiners;
};

LoadedCombiner parse_combiner(const std::string& text, const std::string& source_name);
LoadedCombiner load_combiner(const std::string& path);

}  // namespace crbmo
