#pragma once

// Comparison metrics recomputed from logged trace data only.

#include <string>
#include <vector>

#include "bftsmpc/trace.hpp"

namespace bftsmpc {

/// Sum of realised stage costs over all steps, recomputed from the logged
/// states and inputs with the trace's weights. Throws EmptyTrace.
double cumulative_cost(const SimulationTrace& trace);

/// Running sum of cumulative_cost, one entry per step.
std::vector<double> cumulative_cost_series(const SimulationTrace& trace);

/// Ego position is inside the participant's footprint-plus-margin ellipse
/// (risk parameter 0.5, zero covariance) at the participant's logged pose.
bool safety_violated(const SimulationTrace& trace, std::size_t step, std::size_t participant);

inline constexpr double kSlackEventThreshold = 1e-6;

struct SafetyReport {
  std::vector<double> min_distance;
  /// Steps at which each participant's threshold was violated.
  std::vector<int> violations;
  /// Steps with at least one violation.
  int violation_steps = 0;
  /// Steps whose plan used more than kSlackEventThreshold slack.
  int slack_events = 0;
  int solver_failures = 0;
};

/// Throws EmptyTrace.
SafetyReport safety_report(const SimulationTrace& trace);

struct RunSummary {
  std::string scenario;
  std::string strategy;
  std::uint64_t seed = 0;
  double j_sim = 0.0;
  SafetyReport safety;
  std::vector<std::string> participant_ids;
  /// Final ego x ahead of each participant's final x.
  std::vector<bool> passed;
  /// Overtake flag for the scenario's overtake target (false when none).
  bool overtook_target = false;
  /// Most negative applied longitudinal acceleration.
  double min_ax = 0.0;
  double final_x = 0.0;
};

RunSummary summarize(const SimulationTrace& trace);

}  // namespace bftsmpc
