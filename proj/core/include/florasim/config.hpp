#pragma once

#include <cstdint>
#include <string>

#include "florasim/engine.hpp"

namespace florasim {

// Strict scenario parser: bad JSON raises SyntaxError, unknown or mistyped
// fields raise SchemaError naming the full field path. `seed_given` (optional)
// reports whether engine.seed appeared, so callers can apply seed precedence.
ScenarioConfig parse_config(const std::string& json_text, bool* seed_given = nullptr);

// Standalone machine layout document ({"modules": [...]}), same strictness.
LayoutSpec parse_layout_spec(const std::string& json_text);
std::string write_layout_spec(const LayoutSpec& spec);

// Canonical serialization: every field materialised, keys sorted, compact.
// The seed is deliberately left out so reruns under a new seed share a digest.
std::string write_config(const ScenarioConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);

// FNV-1a over the canonical form, as 16 lowercase hex digits.
std::string config_digest(const ScenarioConfig& config);

}  // namespace florasim
