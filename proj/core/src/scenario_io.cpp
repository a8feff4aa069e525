#include "bftsmpc/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bftsmpc/error.hpp"
#include "json_fields.hpp"

namespace bftsmpc {

using nlohmann::json;
using detail::fail;
using detail::field;
using detail::read;
using detail::read_or;

namespace {

json vec_to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 vec_from_json(const json& doc, const std::string& path) {
  if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number() || !doc[1].is_number()) {
    fail(path, "expected [x, y]");
  }
  return {doc[0].get<double>(), doc[1].get<double>()};
}

json mat_to_json(const Mat2& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

Mat2 mat_from_json(const json& doc, const std::string& path) {
  if (!doc.is_array() || doc.size() != 2) fail(path, "expected a 2x2 nested array");
  Mat2 m;
  for (int r = 0; r < 2; ++r) {
    const Vec2 row = vec_from_json(doc[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]");
    m(r, 0) = row.x();
    m(r, 1) = row.y();
  }
  return m;
}

template <int N>
json diag_to_json(const Eigen::Matrix<double, N, 1>& v) {
  json out = json::array();
  for (int i = 0; i < N; ++i) out.push_back(v(i));
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> diag_from_json(const json& doc, const std::string& path) {
  if (!doc.is_array() || doc.size() != static_cast<std::size_t>(N)) {
    fail(path, "expected an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    const auto& e = doc[static_cast<std::size_t>(i)];
    if (!e.is_number()) fail(path, "expected numbers");
    v(i) = e.get<double>();
  }
  return v;
}

std::string error_detail(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

}  // namespace

json planner_config_to_json(const PlannerConfig& cfg) {
  const auto& sb = cfg.state_bounds;
  const auto& ib = cfg.input_bounds;
  const auto& so = cfg.solver;
  return {
      {"horizon", cfg.horizon},
      {"sampling_time", cfg.sampling_time},
      {"q_diag", diag_to_json<4>(cfg.q_diag)},
      {"p_diag", diag_to_json<4>(cfg.p_diag)},
      {"r_diag", diag_to_json<2>(cfg.r_diag)},
      {"s_diag", diag_to_json<2>(cfg.s_diag)},
      {"v_ref", cfg.v_ref},
      {"y_lane", cfg.y_lane},
      {"state_bounds",
       {{"y_min", sb.y_min}, {"y_max", sb.y_max}, {"vx_min", sb.vx_min}, {"vx_max", sb.vx_max},
        {"vy_max", sb.vy_max}}},
      {"input_bounds", {{"ax_min", ib.ax_min}, {"ax_max", ib.ax_max}, {"ay_max", ib.ay_max}}},
      {"solver",
       {{"max_iterations", so.max_iterations},
        {"tolerance", so.tolerance},
        {"penalty_linear", so.penalty_linear},
        {"penalty_quadratic", so.penalty_quadratic},
        {"constraint_backoff", so.constraint_backoff}}},
  };
}

PlannerConfig planner_config_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  PlannerConfig cfg;
  cfg.horizon = read_or<int>(doc, "horizon", path, cfg.horizon);
  cfg.sampling_time = read_or<double>(doc, "sampling_time", path, cfg.sampling_time);
  if (doc.contains("q_diag")) cfg.q_diag = diag_from_json<4>(doc["q_diag"], path + ".q_diag");
  if (doc.contains("p_diag")) cfg.p_diag = diag_from_json<4>(doc["p_diag"], path + ".p_diag");
  if (doc.contains("r_diag")) cfg.r_diag = diag_from_json<2>(doc["r_diag"], path + ".r_diag");
  if (doc.contains("s_diag")) cfg.s_diag = diag_from_json<2>(doc["s_diag"], path + ".s_diag");
  cfg.v_ref = read_or<double>(doc, "v_ref", path, cfg.v_ref);
  cfg.y_lane = read_or<double>(doc, "y_lane", path, cfg.y_lane);
  if (doc.contains("state_bounds")) {
    const auto& sb = doc["state_bounds"];
    const std::string p = path + ".state_bounds";
    if (!sb.is_object()) fail(p, "expected an object");
    auto& b = cfg.state_bounds;
    b.y_min = read_or<double>(sb, "y_min", p, b.y_min);
    b.y_max = read_or<double>(sb, "y_max", p, b.y_max);
    b.vx_min = read_or<double>(sb, "vx_min", p, b.vx_min);
    b.vx_max = read_or<double>(sb, "vx_max", p, b.vx_max);
    b.vy_max = read_or<double>(sb, "vy_max", p, b.vy_max);
  }
  if (doc.contains("input_bounds")) {
    const auto& ib = doc["input_bounds"];
    const std::string p = path + ".input_bounds";
    if (!ib.is_object()) fail(p, "expected an object");
    auto& b = cfg.input_bounds;
    b.ax_min = read_or<double>(ib, "ax_min", p, b.ax_min);
    b.ax_max = read_or<double>(ib, "ax_max", p, b.ax_max);
    b.ay_max = read_or<double>(ib, "ay_max", p, b.ay_max);
  }
  if (doc.contains("solver")) {
    const auto& so = doc["solver"];
    const std::string p = path + ".solver";
    if (!so.is_object()) fail(p, "expected an object");
    auto& s = cfg.solver;
    s.max_iterations = read_or<int>(so, "max_iterations", p, s.max_iterations);
    s.tolerance = read_or<double>(so, "tolerance", p, s.tolerance);
    s.penalty_linear = read_or<double>(so, "penalty_linear", p, s.penalty_linear);
    s.penalty_quadratic = read_or<double>(so, "penalty_quadratic", p, s.penalty_quadratic);
    s.constraint_backoff = read_or<double>(so, "constraint_backoff", p, s.constraint_backoff);
  }
  return cfg;
}

json scenario_to_json(const Scenario& sc) {
  json participants = json::array();
  for (const auto& tp : sc.participants) {
    json modes = json::array();
    for (const auto& m : tp.modes) {
      json wps = json::array();
      for (const auto& w : m.waypoints) wps.push_back(vec_to_json(w));
      modes.push_back({{"label", m.label},
                       {"waypoints", wps},
                       {"speed", m.speed},
                       {"departure_time", m.departure_time},
                       {"lateral_shift", m.lateral_shift},
                       {"shift_start", m.shift_start},
                       {"shift_duration", m.shift_duration},
                       {"shift_pending", m.shift_pending}});
    }
    json keyframes = json::array();
    for (const auto& kf : tp.belief.keyframes) {
      keyframes.push_back({{"time", kf.time}, {"masses", opinion_to_json(kf.opinion)["masses"]}});
    }
    participants.push_back({
        {"id", tp.id},
        {"kind", std::string(to_string(tp.kind))},
        {"half_length", tp.half_length},
        {"half_width", tp.half_width},
        {"modes", modes},
        {"true_mode", tp.modes.at(tp.true_mode).label},
        {"covariance_base", mat_to_json(tp.covariance_base)},
        {"covariance_growth", mat_to_json(tp.covariance_growth)},
        {"belief",
         {{"noise_std", tp.belief.noise_std},
          {"rng_seed", tp.belief.rng_seed},
          {"keyframes", keyframes}}},
    });
  }
  const auto& e = sc.ego.initial;
  return {
      {"name", sc.name},
      {"description", sc.description},
      {"duration_steps", sc.duration_steps},
      {"safety_margin", sc.safety_margin},
      {"overtake_target", sc.overtake_target},
      {"reference_lanes", sc.reference_lanes},
      {"road",
       {{"lane_count", sc.road.lane_count},
        {"lane_width", sc.road.lane_width},
        {"lane_centers", sc.road.lane_centers},
        {"y_min", sc.road.y_min},
        {"y_max", sc.road.y_max}}},
      {"ego",
       {{"initial_state", {{"x", e.x}, {"vx", e.vx}, {"y", e.y}, {"vy", e.vy}}},
        {"half_length", sc.ego.half_length},
        {"half_width", sc.ego.half_width}}},
      {"planner", planner_config_to_json(sc.planner)},
      {"participants", participants},
  };
}

namespace {

ModeSpec mode_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  ModeSpec m;
  m.label = read<std::string>(doc, "label", path);
  const auto& wps = field(doc, "waypoints", path);
  if (!wps.is_array()) fail(path + ".waypoints", "expected an array");
  for (std::size_t i = 0; i < wps.size(); ++i) {
    m.waypoints.push_back(vec_from_json(wps[i], path + ".waypoints[" + std::to_string(i) + "]"));
  }
  m.speed = read<double>(doc, "speed", path);
  m.departure_time = read_or<double>(doc, "departure_time", path, m.departure_time);
  m.lateral_shift = read_or<double>(doc, "lateral_shift", path, m.lateral_shift);
  m.shift_start = read_or<double>(doc, "shift_start", path, m.shift_start);
  m.shift_duration = read_or<double>(doc, "shift_duration", path, m.shift_duration);
  m.shift_pending = read_or<bool>(doc, "shift_pending", path, m.shift_pending);
  return m;
}

TrafficParticipant participant_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  TrafficParticipant tp;
  tp.id = read<std::string>(doc, "id", path);
  const auto kind_name = read<std::string>(doc, "kind", path);
  const auto kind = parse_participant_kind(kind_name);
  if (!kind) fail(path + ".kind", "unknown kind '" + kind_name + "'");
  tp.kind = *kind;
  tp.half_length = read_or<double>(doc, "half_length", path, tp.half_length);
  tp.half_width = read_or<double>(doc, "half_width", path, tp.half_width);

  const auto& modes = field(doc, "modes", path);
  if (!modes.is_array() || modes.empty()) fail(path + ".modes", "expected a nonempty array");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    tp.modes.push_back(mode_from_json(modes[i], path + ".modes[" + std::to_string(i) + "]"));
  }
  const auto truth = read<std::string>(doc, "true_mode", path);
  bool found = false;
  for (std::size_t i = 0; i < tp.modes.size(); ++i) {
    if (tp.modes[i].label == truth) {
      tp.true_mode = i;
      found = true;
      break;
    }
  }
  if (!found) fail(path + ".true_mode", "no mode labelled '" + truth + "'");
  if (doc.contains("covariance_base")) {
    tp.covariance_base = mat_from_json(doc["covariance_base"], path + ".covariance_base");
  }
  if (doc.contains("covariance_growth")) {
    tp.covariance_growth = mat_from_json(doc["covariance_growth"], path + ".covariance_growth");
  }

  Frame frame = [&] {
    try {
      return tp.frame();
    } catch (const Error& e) {
      throw Error(e.code(), path + ".modes: " + error_detail(e));
    }
  }();
  const std::string bp = path + ".belief";
  const auto& belief = field(doc, "belief", path);
  if (!belief.is_object()) fail(bp, "expected an object");
  tp.belief.noise_std = read_or<double>(belief, "noise_std", bp, 0.0);
  tp.belief.rng_seed = read_or<std::uint64_t>(belief, "rng_seed", bp, 0);
  const auto& kfs = field(belief, "keyframes", bp);
  if (!kfs.is_array()) fail(bp + ".keyframes", "expected an array");
  for (std::size_t k = 0; k < kfs.size(); ++k) {
    const std::string kp = bp + ".keyframes[" + std::to_string(k) + "]";
    if (!kfs[k].is_object()) fail(kp, "expected an object");
    const double time = read<double>(kfs[k], "time", kp);
    std::ostringstream where;
    where << kp << " (t=" << time << " s)";
    try {
      json op = {{"masses", field(kfs[k], "masses", kp)}};
      tp.belief.keyframes.push_back({time, opinion_from_json(op, frame)});
    } catch (const Error& e) {
      throw Error(e.code(), where.str() + ": " + error_detail(e));
    }
  }
  return tp;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected an object");
  Scenario sc;
  sc.name = read<std::string>(doc, "name", "<root>");
  sc.description = read_or<std::string>(doc, "description", "<root>", "");
  sc.duration_steps = read_or<int>(doc, "duration_steps", "<root>", sc.duration_steps);
  sc.safety_margin = read_or<double>(doc, "safety_margin", "<root>", sc.safety_margin);
  sc.overtake_target = read_or<std::string>(doc, "overtake_target", "<root>", "");
  sc.reference_lanes = read_or<std::vector<double>>(doc, "reference_lanes", "<root>", {});

  const auto& road = field(doc, "road", "<root>");
  if (!road.is_object()) fail("road", "expected an object");
  sc.road.lane_count = read<int>(road, "lane_count", "road");
  sc.road.lane_width = read<double>(road, "lane_width", "road");
  sc.road.lane_centers = read<std::vector<double>>(road, "lane_centers", "road");
  sc.road.y_min = read<double>(road, "y_min", "road");
  sc.road.y_max = read<double>(road, "y_max", "road");

  const auto& ego = field(doc, "ego", "<root>");
  if (!ego.is_object()) fail("ego", "expected an object");
  const auto& init = field(ego, "initial_state", "ego");
  if (!init.is_object()) fail("ego.initial_state", "expected an object");
  sc.ego.initial.x = read<double>(init, "x", "ego.initial_state");
  sc.ego.initial.vx = read<double>(init, "vx", "ego.initial_state");
  sc.ego.initial.y = read<double>(init, "y", "ego.initial_state");
  sc.ego.initial.vy = read<double>(init, "vy", "ego.initial_state");
  sc.ego.half_length = read_or<double>(ego, "half_length", "ego", sc.ego.half_length);
  sc.ego.half_width = read_or<double>(ego, "half_width", "ego", sc.ego.half_width);

  if (doc.contains("planner")) sc.planner = planner_config_from_json(doc["planner"], "planner");

  const auto& tps = field(doc, "participants", "<root>");
  if (!tps.is_array()) fail("participants", "expected an array");
  for (std::size_t i = 0; i < tps.size(); ++i) {
    sc.participants.push_back(participant_from_json(tps[i], "participants[" + std::to_string(i) + "]"));
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + file.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, file.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

void save_scenario_file(const Scenario& sc, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + file.string() + "'");
  out << scenario_to_json(sc).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + file.string() + "'");
}

}  // namespace bftsmpc
