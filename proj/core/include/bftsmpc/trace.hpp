#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bftsmpc/opinion.hpp"
#include "bftsmpc/planner.hpp"

namespace bftsmpc {

struct ModeRecord {
  bool included = true;
  double beta = 0.0;
  /// Tightening factor applied to the ellipse weight (1 when untouched).
  double scale = 1.0;
  /// False when tightening relaxed the constraint away entirely.
  bool active = true;
};

struct ParticipantRecord {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  /// Center-to-center distance to the ego.
  double distance = 0.0;
  std::optional<Opinion> opinion;
  std::vector<double> probabilities;
  std::vector<ModeRecord> modes;
};

/// One closed-loop step: the state the input was applied at, the input, and
/// the previous input (for the rate term of the stage cost).
struct StepRecord {
  int step = 0;
  double time = 0.0;
  EgoState state;
  EgoInput input;
  EgoInput input_prev;
  /// Lateral reference tracked at this step.
  double y_lane = 0.0;
  double stage_cost = 0.0;
  double plan_cost = 0.0;
  double slack_used = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
  bool converged = false;
  /// The solve threw; the previous input was held.
  bool solver_failed = false;
  bool uniform_fallback = false;
  std::vector<ParticipantRecord> participants;
};

struct ParticipantInfo {
  std::string id;
  std::string kind;
  double half_length = 0.0;
  double half_width = 0.0;
  std::vector<std::string> mode_labels;
};

struct SimulationTrace {
  std::string scenario;
  std::string strategy;
  std::uint64_t seed = 0;
  PlannerConfig planner;
  double ego_half_length = 2.25;
  double ego_half_width = 0.9;
  double safety_margin = 0.25;
  std::string overtake_target;
  std::vector<ParticipantInfo> participants;
  std::vector<StepRecord> steps;
  /// Ego state after the last applied input, and participant positions then.
  EgoState final_state;
  std::vector<Vec2> final_participant_positions;
};

}  // namespace bftsmpc
