#include "bftsmpc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bftsmpc/error.hpp"

namespace bftsmpc {

std::string_view to_string(ParticipantKind kind) {
  switch (kind) {
    case ParticipantKind::Vehicle: return "vehicle";
    case ParticipantKind::Cyclist: return "cyclist";
    case ParticipantKind::Pedestrian: return "pedestrian";
  }
  return "vehicle";
}

std::optional<ParticipantKind> parse_participant_kind(std::string_view name) {
  if (name == "vehicle") return ParticipantKind::Vehicle;
  if (name == "cyclist") return ParticipantKind::Cyclist;
  if (name == "pedestrian") return ParticipantKind::Pedestrian;
  return std::nullopt;
}

double lane_change_ramp(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

double ModeSpec::path_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) len += (waypoints[i] - waypoints[i - 1]).norm();
  return len;
}

namespace {

struct PathPoint {
  Vec2 position;
  Vec2 tangent;
};

PathPoint point_at_arclength(const std::vector<Vec2>& pts, double s) {
  if (pts.size() < 2) return {pts.empty() ? Vec2::Zero() : pts.front(), Vec2::UnitX()};
  double remaining = s;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 seg = pts[i] - pts[i - 1];
    const double len = seg.norm();
    if (len <= 0.0) continue;
    const Vec2 dir = seg / len;
    if (remaining <= len || i + 1 == pts.size()) {
      return {pts[i - 1] + std::max(0.0, remaining) * dir, dir};
    }
    remaining -= len;
  }
  return {pts.back(), Vec2::UnitX()};
}

}  // namespace

namespace {

Vec2 shifted(const ModeSpec& m, double t, double start) {
  const auto p = point_at_arclength(m.waypoints, m.speed * std::max(0.0, t - m.departure_time));
  if (m.lateral_shift == 0.0) return p.position;
  const Vec2 left(-p.tangent.y(), p.tangent.x());
  return p.position + m.lateral_shift * lane_change_ramp((t - start) / m.shift_duration) * left;
}

}  // namespace

Vec2 ModeSpec::position(double t) const {
  return shifted(*this, t, shift_pending ? std::numeric_limits<double>::infinity() : shift_start);
}

Vec2 ModeSpec::predicted_position(double t_now, double t) const {
  return shifted(*this, t, shift_pending ? t_now : shift_start);
}

double ModeSpec::heading(double t) const {
  const double s = speed * std::max(0.0, t - departure_time);
  const auto p = point_at_arclength(waypoints, s);
  return std::atan2(p.tangent.y(), p.tangent.x());
}

Frame TrafficParticipant::frame() const {
  std::vector<std::string> labels;
  labels.reserve(modes.size());
  for (const auto& m : modes) labels.push_back(m.label);
  return Frame(std::move(labels));
}

double Scenario::lane_reference(double y) const {
  if (reference_lanes.empty()) return planner.y_lane;
  double best = reference_lanes.front();
  for (double c : reference_lanes) {
    if (std::abs(c - y) < std::abs(best - y)) best = c;
  }
  return best;
}

const TrafficParticipant* Scenario::find_participant(std::string_view id) const {
  for (const auto& p : participants) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

namespace {

bool is_psd(const Mat2& m) {
  if (!m.allFinite() || std::abs(m(0, 1) - m(1, 0)) > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Mat2> eig(0.5 * (m + m.transpose()));
  return eig.eigenvalues().minCoeff() >= -1e-9;
}

}  // namespace

std::vector<std::string> scenario_problems(const Scenario& sc) {
  std::vector<std::string> out;
  auto problem = [&out](const std::string& where, const std::string& what) {
    out.push_back(where + ": " + what);
  };

  if (sc.name.empty()) problem("name", "must not be empty");
  if (sc.duration_steps < 1) problem("duration_steps", "must be >= 1");
  if (!(sc.safety_margin >= 0.0)) problem("safety_margin", "must be nonnegative");

  const auto& road = sc.road;
  if (road.lane_count < 1) problem("road.lane_count", "must be >= 1");
  if (!(road.lane_width > 0.0)) {
    std::ostringstream msg;
    msg << "lane width " << road.lane_width << " must be positive";
    problem("road.lane_width", msg.str());
  }
  if (static_cast<int>(road.lane_centers.size()) != road.lane_count) {
    problem("road.lane_centers", "expected " + std::to_string(road.lane_count) + " entries");
  }
  if (!(road.y_min < road.y_max)) problem("road", "y_min must be below y_max");
  for (double c : road.lane_centers) {
    if (c < road.y_min || c > road.y_max) problem("road.lane_centers", "center outside road");
  }

  for (double c : sc.reference_lanes) {
    if (!std::isfinite(c) || c < road.y_min || c > road.y_max) {
      problem("reference_lanes", "lane center outside road");
    }
  }

  if (!(sc.ego.half_length > 0.0 && sc.ego.half_width > 0.0)) {
    problem("ego", "footprint half dimensions must be positive");
  }
  const auto& e = sc.ego.initial;
  if (!std::isfinite(e.x) || !std::isfinite(e.vx) || !std::isfinite(e.y) || !std::isfinite(e.vy)) {
    problem("ego.initial_state", "must be finite");
  }
  try {
    sc.planner.validate();
  } catch (const Error& err) {
    problem("planner", err.what());
  }

  std::set<std::string> ids;
  for (std::size_t i = 0; i < sc.participants.size(); ++i) {
    const auto& tp = sc.participants[i];
    const std::string where = "participants[" + std::to_string(i) + "] (" + tp.id + ")";
    if (tp.id.empty()) problem(where, "id must not be empty");
    if (!ids.insert(tp.id).second) problem(where, "duplicate id");
    if (!(tp.half_length > 0.0 && tp.half_width > 0.0)) {
      problem(where, "footprint half dimensions must be positive");
    }
    if (tp.modes.empty()) {
      problem(where, "needs at least one mode");
      continue;
    }
    if (tp.true_mode >= tp.modes.size()) {
      problem(where, "true_mode index out of range");
    } else if (tp.modes[tp.true_mode].shift_pending) {
      problem(where, "true mode cannot have a pending shift");
    }
    try {
      (void)tp.frame();
    } catch (const Error& err) {
      problem(where + ".modes", err.what());
    }
    for (const auto& m : tp.modes) {
      const std::string mw = where + ".modes[" + m.label + "]";
      if (m.waypoints.size() < 2) problem(mw, "needs at least two waypoints");
      if (m.waypoints.size() >= 2 && !(m.path_length() > 0.0)) problem(mw, "path has zero length");
      if (!(m.speed >= 0.0)) problem(mw, "speed must be nonnegative");
      if (!(m.shift_duration > 0.0)) problem(mw, "shift_duration must be positive");
    }
    if (!is_psd(tp.covariance_base)) problem(where, "covariance_base is not symmetric PSD");
    if (!is_psd(tp.covariance_growth)) problem(where, "covariance_growth is not symmetric PSD");

    const auto& sched = tp.belief;
    if (sched.keyframes.empty()) problem(where + ".belief", "needs at least one keyframe");
    if (!(sched.noise_std >= 0.0)) problem(where + ".belief", "noise_std must be nonnegative");
    for (std::size_t k = 0; k < sched.keyframes.size(); ++k) {
      const auto& kf = sched.keyframes[k];
      if (k > 0 && !(kf.time > sched.keyframes[k - 1].time)) {
        problem(where + ".belief", "keyframe times must be strictly increasing");
      }
      if (kf.opinion.frame().size() != tp.modes.size()) {
        problem(where + ".belief", "keyframe frame does not match the modes");
      }
    }
  }
  if (!sc.overtake_target.empty() && sc.find_participant(sc.overtake_target) == nullptr) {
    problem("overtake_target", "unknown participant '" + sc.overtake_target + "'");
  }
  return out;
}

void validate_scenario(const Scenario& sc) {
  const auto problems = scenario_problems(sc);
  if (problems.empty()) return;
  std::string msg = "scenario '" + sc.name + "' is invalid:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw Error(ErrorCode::ScenarioInvalid, msg);
}

Scenario builtin_scenario(std::string_view name) {
  for (auto& sc : builtin_scenarios()) {
    if (sc.name == name) return sc;
  }
  throw Error(ErrorCode::ScenarioInvalid, "unknown builtin scenario '" + std::string(name) + "'");
}

}  // namespace bftsmpc
