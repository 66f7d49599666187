#pragma once

#include "elab/universal_fraction.hpp"

#include <string>
#include <vector>

namespace elab {

struct LoadedFamily {
  ChannelFamily family;
  std::vector<std::string> warnings;  // e.g. clamped endpoint crossovers
};

/// Parses the family JSON document:
///   {"type":"bsc_grid","thetas":[...],"px":[...]}
///   {"type":"dmc_set","channels":[[[...]]],"px":[...]}
/// BSC crossovers at 0 or 1 are clamped into [1e-4, 1-1e-4] with a warning.
LoadedFamily parse_family_json(const std::string& text);

/// Loads a family from a file path, or from an inline "bsc:t1,t2,..." spec.
LoadedFamily load_family(const std::string& path_or_spec);

std::string family_to_json(const ChannelFamily& family);

}  // namespace elab
