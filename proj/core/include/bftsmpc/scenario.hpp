#pragma once

// Scripted traffic scenarios: road layout, ego setup, and traffic participants
// with multi-modal candidate paths and time-varying belief schedules.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bftsmpc/opinion.hpp"
#include "bftsmpc/planner.hpp"
#include "bftsmpc/risk_constraints.hpp"

namespace bftsmpc {

enum class ParticipantKind { Vehicle, Cyclist, Pedestrian };

std::string_view to_string(ParticipantKind kind);
std::optional<ParticipantKind> parse_participant_kind(std::string_view name);

/// Smooth 0 -> 1 lateral ramp over s in [0, 1]: (1 - cos(pi s)) / 2, clamped outside.
double lane_change_ramp(double s);

/// One candidate trajectory. The participant moves along a polyline at
/// constant speed once departed (extrapolating past the last waypoint along
/// the final segment), optionally blended with a lateral offset to the left of
/// the path that follows lane_change_ramp. A pending shift has no scheduled
/// start: the participant never executes it, and predictions made at time
/// t_now start it at t_now.
struct ModeSpec {
  std::string label;
  std::vector<Vec2> waypoints;
  double speed = 0.0;
  double departure_time = 0.0;
  double lateral_shift = 0.0;
  double shift_start = 0.0;
  double shift_duration = 3.0;
  bool shift_pending = false;

  double path_length() const;
  Vec2 position(double t) const;
  /// Position at time t as predicted at t_now; equals position(t) unless the
  /// shift is pending.
  Vec2 predicted_position(double t_now, double t) const;
  /// Heading of the underlying path (radians from +x).
  double heading(double t) const;
};

struct BeliefKeyframe {
  double time = 0.0;
  Opinion opinion;
};

struct BeliefSchedule {
  std::vector<BeliefKeyframe> keyframes;
  double noise_std = 0.0;
  std::uint64_t rng_seed = 0;
};

struct TrafficParticipant {
  std::string id;
  ParticipantKind kind = ParticipantKind::Vehicle;
  double half_length = 2.25;
  double half_width = 0.9;
  std::vector<ModeSpec> modes;
  std::size_t true_mode = 0;
  Mat2 covariance_base = Mat2::Zero();
  /// Added once per prediction step: Sigma_k = base + k * growth.
  Mat2 covariance_growth = Mat2::Zero();
  BeliefSchedule belief;

  Frame frame() const;
  Vec2 position(double t) const { return modes.at(true_mode).position(t); }
  double heading(double t) const { return modes.at(true_mode).heading(t); }
  Mat2 covariance_at(int k) const { return covariance_base + k * covariance_growth; }
};

struct RoadGeometry {
  int lane_count = 1;
  double lane_width = 3.5;
  std::vector<double> lane_centers;
  /// Drivable lateral band.
  double y_min = -1.75;
  double y_max = 1.75;
};

struct EgoSpec {
  EgoState initial;
  double half_length = 2.25;
  double half_width = 0.9;
};

struct Scenario {
  std::string name;
  std::string description;
  RoadGeometry road;
  EgoSpec ego;
  PlannerConfig planner;
  double safety_margin = 0.25;
  int duration_steps = 100;
  /// Lane centers the ego may track. Each step the lateral reference is the
  /// one nearest the ego; empty means planner.y_lane throughout.
  std::vector<double> reference_lanes;
  /// Participant whose passing is reported by the overtake flag.
  std::string overtake_target;
  std::vector<TrafficParticipant> participants;

  double duration() const { return duration_steps * planner.sampling_time; }
  double lane_reference(double y) const;
  const TrafficParticipant* find_participant(std::string_view id) const;
};

/// Every invariant violation, one human-readable line each; empty iff valid.
std::vector<std::string> scenario_problems(const Scenario& sc);

/// Throws Error(ScenarioInvalid) listing all problems.
void validate_scenario(const Scenario& sc);

std::vector<Scenario> builtin_scenarios();
/// Throws Error(ScenarioInvalid) for an unknown name.
Scenario builtin_scenario(std::string_view name);

}  // namespace bftsmpc
