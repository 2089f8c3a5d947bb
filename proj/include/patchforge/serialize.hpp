#ifndef PATCHFORGE_SERIALIZE_HPP
#define PATCHFORGE_SERIALIZE_HPP

#include "patchforge/attack.hpp"
#include "patchforge/color_grid.hpp"
#include "patchforge/eot.hpp"
#include "patchforge/geometry.hpp"
#include "patchforge/pso.hpp"

#include <json.hpp>

namespace patchforge {

/// Rounds to 9 significant decimal digits, the precision patch offsets are
/// stored with. Idempotent.
double round_sig9(double v);

// Patch:  {"n": int, "cells": [int...], "offsets": [[u, v]...]}
// Grid:   {"k": int, "colors": [[r, g, b]...]}
// Unified patch: {"shape": <patch>, "grid": <grid>}
nlohmann::json patch_to_json(const PolygonPatch& p);
PolygonPatch patch_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const ColorGrid& g);
ColorGrid grid_from_json(const nlohmann::json& j);
nlohmann::json unified_to_json(const UnifiedPatch& p);
UnifiedPatch unified_from_json(const nlohmann::json& j);

nlohmann::json history_to_json(const std::vector<GenerationRecord>& h);
std::vector<GenerationRecord> history_from_json(const nlohmann::json& j);

nlohmann::json outcome_to_json(const AttackOutcome& o);
AttackOutcome outcome_from_json(const nlohmann::json& j);

nlohmann::json swarm_to_json(const SwarmConfig<double>& cfg);
nlohmann::json eot_to_json(const EotConfig& cfg);

}  // namespace patchforge

#endif  // PATCHFORGE_SERIALIZE_HPP
