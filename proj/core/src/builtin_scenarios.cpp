#include <initializer_list>
#include <utility>

#include "bftsmpc/scenario.hpp"

namespace bftsmpc {

namespace {

using MassList = std::initializer_list<std::pair<const char*, double>>;

Opinion masses(const Frame& frame, MassList list) {
  MassMap m;
  for (const auto& [key, v] : list) m[frame.parse_subset_key(key)] = v;
  return validate_opinion(frame, m);
}

BeliefSchedule schedule(const Frame& frame, std::initializer_list<std::pair<double, MassList>> kfs,
                        double noise_std, std::uint64_t seed) {
  BeliefSchedule s;
  for (const auto& [t, list] : kfs) s.keyframes.push_back({t, masses(frame, list)});
  s.noise_std = noise_std;
  s.rng_seed = seed;
  return s;
}

ModeSpec straight_mode(std::string label, Vec2 from, Vec2 to, double speed) {
  ModeSpec m;
  m.label = std::move(label);
  m.waypoints = {from, to};
  m.speed = speed;
  return m;
}

ModeSpec path_mode(std::string label, std::vector<Vec2> waypoints, double speed,
                   double departure = 0.0) {
  ModeSpec m;
  m.label = std::move(label);
  m.waypoints = std::move(waypoints);
  m.speed = speed;
  m.departure_time = departure;
  return m;
}

Mat2 diag(double xx, double yy) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = xx;
  m(1, 1) = yy;
  return m;
}

Scenario highway() {
  Scenario sc;
  sc.name = "highway";
  sc.description =
      "Ego in the rightmost of three lanes approaches a slower vehicle (TP1) that keeps its lane; "
      "a vehicle in the leftmost lane (TP2) merges into the middle lane shortly after t = 6 s.";
  sc.road.lane_count = 3;
  sc.road.lane_width = 3.5;
  sc.road.lane_centers = {0.0, 3.5, 7.0};
  sc.road.y_min = -1.75;
  sc.road.y_max = 8.75;
  sc.ego.initial = {0.0, 20.0, 0.0, 0.0};
  sc.planner.v_ref = 20.0;
  sc.planner.y_lane = 0.0;
  // Ego footprint stays on the right two lanes.
  sc.planner.state_bounds.y_min = -0.85;
  sc.planner.state_bounds.y_max = 4.5;
  sc.duration_steps = 100;
  sc.safety_margin = 0.25;
  sc.overtake_target = "TP1";
  sc.reference_lanes = {0.0, 3.5, 7.0};

  TrafficParticipant tp1;
  tp1.id = "TP1";
  tp1.modes.push_back(straight_mode("keep", {30.0, -0.3}, {3000.0, -0.3}, 14.0));
  ModeSpec change1 = straight_mode("change", {30.0, -0.3}, {3000.0, -0.3}, 14.0);
  change1.lateral_shift = 3.5;
  change1.shift_pending = true;
  tp1.modes.push_back(change1);
  tp1.true_mode = 0;
  tp1.covariance_base = diag(0.25, 0.04);
  tp1.covariance_growth = diag(0.08, 0.035);
  tp1.belief = schedule(tp1.frame(),
                        {{0.0, {{"keep", 0.30}, {"change", 0.10}, {"*", 0.60}}},
                         {4.0, {{"keep", 0.50}, {"change", 0.10}, {"*", 0.40}}},
                         {8.0, {{"keep", 0.80}, {"change", 0.05}, {"*", 0.15}}},
                         {12.0, {{"keep", 0.93}, {"change", 0.02}, {"*", 0.05}}}},
                        0.02, 1);
  sc.participants.push_back(tp1);

  TrafficParticipant tp2;
  tp2.id = "TP2";
  tp2.modes.push_back(straight_mode("keep", {4.0, 7.0}, {3000.0, 7.0}, 19.0));
  ModeSpec change2 = straight_mode("change", {4.0, 7.0}, {3000.0, 7.0}, 19.0);
  change2.lateral_shift = -3.5;
  change2.shift_start = 5.0;
  tp2.modes.push_back(change2);
  tp2.true_mode = 1;
  tp2.covariance_base = diag(0.25, 0.04);
  tp2.covariance_growth = diag(0.08, 0.035);
  tp2.belief = schedule(tp2.frame(),
                        {{0.0, {{"keep", 0.40}, {"change", 0.10}, {"*", 0.50}}},
                         {5.0, {{"keep", 0.50}, {"change", 0.15}, {"*", 0.35}}},
                         {6.0, {{"keep", 0.45}, {"change", 0.25}, {"*", 0.30}}},
                         {7.0, {{"keep", 0.20}, {"change", 0.60}, {"*", 0.20}}},
                         {8.0, {{"keep", 0.05}, {"change", 0.85}, {"*", 0.10}}},
                         {10.0, {{"keep", 0.02}, {"change", 0.95}, {"*", 0.03}}}},
                        0.02, 2);
  sc.participants.push_back(tp2);
  return sc;
}

Scenario intersection() {
  Scenario sc;
  sc.name = "intersection";
  sc.description =
      "Ego drives east through an urban intersection with a vertical road at x = 60. Cyclist TP1 "
      "arrives from the south and turns right ahead of the ego; cyclist TP2 arrives from the north "
      "and crosses straight; pedestrian TP3 crosses the ego's road from the north side.";
  sc.road.lane_count = 2;
  sc.road.lane_width = 3.5;
  sc.road.lane_centers = {0.0, 3.5};
  sc.road.y_min = -1.75;
  sc.road.y_max = 5.25;
  sc.ego.initial = {0.0, 10.0, 0.0, 0.0};
  sc.planner.v_ref = 10.0;
  sc.planner.y_lane = 0.0;
  sc.planner.state_bounds.y_min = -0.85;
  sc.planner.state_bounds.y_max = 4.35;
  sc.planner.input_bounds.ax_min = -6.0;
  sc.planner.input_bounds.ax_max = 2.0;
  sc.duration_steps = 125;
  sc.safety_margin = 0.25;
  sc.overtake_target = "TP1";

  const double cyclist_speed = 4.0;
  TrafficParticipant tp1;
  tp1.id = "TP1";
  tp1.kind = ParticipantKind::Cyclist;
  tp1.half_length = 0.9;
  tp1.half_width = 0.4;
  tp1.modes.push_back(straight_mode("straight", {62.0, -29.0}, {62.0, 3000.0}, cyclist_speed));
  tp1.modes.push_back(path_mode("right", {{62.0, -29.0}, {62.0, -1.0}, {3000.0, -1.0}}, cyclist_speed));
  tp1.modes.push_back(path_mode("bike-lane", {{62.0, -29.0}, {62.0, -4.0}, {68.0, 5.0}, {3000.0, 5.0}}, cyclist_speed));
  tp1.true_mode = 1;
  tp1.covariance_base = diag(0.1, 0.1);
  tp1.covariance_growth = diag(0.15, 0.5);
  tp1.belief = schedule(tp1.frame(),
                        {{0.0, {{"straight", 0.20}, {"right", 0.15}, {"bike-lane", 0.10}, {"*", 0.55}}},
                         {5.0, {{"straight", 0.25}, {"right", 0.25}, {"bike-lane", 0.10}, {"*", 0.40}}},
                         {7.0, {{"straight", 0.10}, {"right", 0.60}, {"bike-lane", 0.10}, {"*", 0.20}}},
                         {9.0, {{"straight", 0.03}, {"right", 0.88}, {"bike-lane", 0.02}, {"*", 0.07}}},
                         {12.0, {{"straight", 0.01}, {"right", 0.94}, {"bike-lane", 0.01}, {"*", 0.04}}}},
                        0.02, 11);
  sc.participants.push_back(tp1);

  TrafficParticipant tp2;
  tp2.id = "TP2";
  tp2.kind = ParticipantKind::Cyclist;
  tp2.half_length = 0.9;
  tp2.half_width = 0.4;
  tp2.modes.push_back(straight_mode("straight", {58.0, 28.0}, {58.0, -3000.0}, cyclist_speed));
  tp2.modes.push_back(path_mode("right", {{58.0, 28.0}, {58.0, 4.6}, {-3000.0, 4.6}}, cyclist_speed));
  tp2.modes.push_back(path_mode("bike-lane", {{58.0, 28.0}, {58.0, -2.5}, {3000.0, -2.5}}, cyclist_speed));
  tp2.true_mode = 0;
  tp2.covariance_base = diag(0.1, 0.1);
  tp2.covariance_growth = diag(0.15, 0.15);
  tp2.belief = schedule(tp2.frame(),
                        {{0.0, {{"straight", 0.20}, {"right", 0.20}, {"bike-lane", 0.10}, {"*", 0.50}}},
                         {5.0, {{"straight", 0.40}, {"right", 0.15}, {"bike-lane", 0.10}, {"*", 0.35}}},
                         {7.0, {{"straight", 0.70}, {"right", 0.05}, {"bike-lane", 0.10}, {"*", 0.15}}},
                         {9.0, {{"straight", 0.90}, {"right", 0.02}, {"bike-lane", 0.03}, {"*", 0.05}}}},
                        0.02, 12);
  sc.participants.push_back(tp2);

  TrafficParticipant tp3;
  tp3.id = "TP3";
  tp3.kind = ParticipantKind::Pedestrian;
  tp3.half_length = 0.3;
  tp3.half_width = 0.3;
  tp3.modes.push_back(path_mode("cross-vertical", {{52.0, 6.5}, {70.0, 6.5}}, 1.4, 0.5));
  tp3.modes.push_back(path_mode("cross-horizontal", {{52.0, 6.5}, {52.0, -4.0}}, 1.4, 0.5));
  tp3.true_mode = 1;
  tp3.covariance_base = diag(0.05, 0.05);
  tp3.covariance_growth = diag(0.03, 0.03);
  tp3.belief = schedule(tp3.frame(),
                        {{0.0, {{"cross-vertical", 0.45}, {"cross-horizontal", 0.15}, {"*", 0.40}}},
                         {3.8, {{"cross-vertical", 0.50}, {"cross-horizontal", 0.20}, {"*", 0.30}}},
                         {4.3, {{"cross-vertical", 0.20}, {"cross-horizontal", 0.55}, {"*", 0.25}}},
                         {5.5, {{"cross-vertical", 0.05}, {"cross-horizontal", 0.85}, {"*", 0.10}}}},
                        0.02, 13);
  sc.participants.push_back(tp3);
  return sc;
}

}  // namespace

std::vector<Scenario> builtin_scenarios() { return {highway(), intersection()}; }

}  // namespace bftsmpc
