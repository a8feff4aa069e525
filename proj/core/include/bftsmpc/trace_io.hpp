#pragma once

// Trace serialisation.
//
// CSV columns, in order:
//   step, time, x, vx, y, vy, ax, ay, ax_prev, ay_prev, y_lane, stage_cost,
//   cumulative_cost, plan_cost, slack_used, max_violation, iterations,
//   converged, solver_failed
// then per participant <id>: <id>_x, <id>_y, <id>_heading, <id>_distance,
//   <id>_violation, and per mode <m>: <id>_<m>_p, <id>_<m>_included,
//   <id>_<m>_beta, <id>_<m>_scale, <id>_<m>_active.
// Reals use 12 significant digits; booleans are 0/1.
//
// The JSON document is lossless and parses back with trace_from_json.

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "bftsmpc/metrics.hpp"
#include "bftsmpc/trace.hpp"

namespace bftsmpc {

std::string trace_to_csv(const SimulationTrace& trace);
nlohmann::json trace_to_json(const SimulationTrace& trace);
/// Throws ParseError with the offending field path.
SimulationTrace trace_from_json(const nlohmann::json& doc);

nlohmann::json summary_to_json(const RunSummary& summary);

/// Writes <stem>.csv, <stem>.json, <stem>_vx.dat (time vx), <stem>_path.dat
/// (x y, ego then one block per participant separated by blank lines) and
/// <stem>_cost.dat (time cumulative cost) into `dir`, creating it if needed.
/// Throws IoError.
void export_trace(const SimulationTrace& trace, const std::filesystem::path& dir,
                  const std::string& stem);

/// Throws IoError or ParseError.
SimulationTrace load_trace_file(const std::filesystem::path& file);

void write_text_file(const std::filesystem::path& file, const std::string& content);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace bftsmpc
