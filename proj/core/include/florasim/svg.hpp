#pragma once

#include <string>

#include "florasim/engine.hpp"

namespace florasim {

// Deterministic SVG 1.1 top view (x right, y up, z ignored): region outlines,
// scaffold segments with their covered spans, robotic nodes, growth tips.
// Same world state always yields byte-identical markup.
std::string render_svg(const WorldState& world, const ScenarioConfig& config);

}  // namespace florasim
