#pragma once

// JSON scenario documents. The layout mirrors the Scenario type field by
// field; see scenarios/*.json for complete examples.

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "bftsmpc/planner.hpp"
#include "bftsmpc/scenario.hpp"

namespace bftsmpc {

nlohmann::json planner_config_to_json(const PlannerConfig& cfg);
/// Missing keys keep their defaults; `path` prefixes error messages.
PlannerConfig planner_config_from_json(const nlohmann::json& doc, const std::string& path = "planner");

nlohmann::json scenario_to_json(const Scenario& sc);

/// Structural and opinion errors throw with the offending field path in the
/// message (ParseError, or the opinion's own code). Scenario invariants are
/// not checked here; see scenario_problems.
Scenario scenario_from_json(const nlohmann::json& doc);

/// Throws IoError when unreadable and ParseError (with line/column) on
/// malformed JSON.
Scenario load_scenario_file(const std::filesystem::path& file);
void save_scenario_file(const Scenario& sc, const std::filesystem::path& file);

}  // namespace bftsmpc
