#pragma once

#include <iosfwd>
#include <string>

#include "coex/csma_model.hpp"
#include "coex/integrator.hpp"
#include "coex/topology.hpp"

namespace coex {

/// Everything a topology file can carry. Missing sections keep their defaults.
struct Scenario {
    Topology topology;
    MacParameters mac;
    LteParams lte;
};

/// Parses a JSON topology document. Unknown keys and mistyped values raise
/// ValidationError naming the offending field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Applies a parameter override document ({"channel": .., "mac": .., "lte": ..})
/// on top of `scenario`.
void apply_overrides(Scenario& scenario, const std::string& text);
void apply_overrides_file(Scenario& scenario, const std::string& path);

std::string dump_scenario(const Scenario& scenario);
void save_scenario(const std::string& path, const Scenario& scenario);

}  // namespace coex
