#include "bftsmpc/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bftsmpc/error.hpp"
#include "bftsmpc/scenario_io.hpp"
#include "json_fields.hpp"

namespace bftsmpc {

using nlohmann::json;
using detail::fail;
using detail::field;
using detail::read;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class CsvRow {
 public:
  CsvRow& operator<<(double v) { return cell(fmt(v)); }
  CsvRow& operator<<(int v) { return cell(std::to_string(v)); }
  CsvRow& operator<<(bool v) { return cell(v ? "1" : "0"); }
  CsvRow& operator<<(const std::string& v) { return cell(v); }
  std::string str() const { return line_ + '\n'; }

 private:
  CsvRow& cell(const std::string& s) {
    if (!first_) line_ += ',';
    line_ += s;
    first_ = false;
    return *this;
  }
  std::string line_;
  bool first_ = true;
};

json state_json(const EgoState& s) { return json::array({s.x, s.vx, s.y, s.vy}); }
json input_json(const EgoInput& u) { return json::array({u.ax, u.ay}); }
json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

std::vector<double> numbers(const json& doc, std::size_t n, const std::string& path) {
  if (!doc.is_array() || doc.size() != n) fail(path, "expected " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& v : doc) out.push_back(detail::convert<double>(v, path));
  return out;
}

EgoState state_from(const json& doc, const std::string& path) {
  const auto v = numbers(doc, 4, path);
  return {v[0], v[1], v[2], v[3]};
}

EgoInput input_from(const json& doc, const std::string& path) {
  const auto v = numbers(doc, 2, path);
  return {v[0], v[1]};
}

Vec2 vec_from(const json& doc, const std::string& path) {
  const auto v = numbers(doc, 2, path);
  return {v[0], v[1]};
}

}  // namespace

std::string trace_to_csv(const SimulationTrace& trace) {
  CsvRow header;
  for (const char* c : {"step", "time", "x", "vx", "y", "vy", "ax", "ay", "ax_prev", "ay_prev",
                        "y_lane", "stage_cost", "cumulative_cost", "plan_cost", "slack_used", "max_violation",
                        "iterations", "converged", "solver_failed"}) {
    header << std::string(c);
  }
  for (const auto& p : trace.participants) {
    for (const char* c : {"_x", "_y", "_heading", "_distance", "_violation"}) header << p.id + c;
    for (const auto& m : p.mode_labels) {
      for (const char* c : {"_p", "_included", "_beta", "_scale", "_active"}) {
        header << p.id + "_" + m + c;
      }
    }
  }
  std::string out = header.str();
  if (trace.steps.empty()) return out;

  const auto cumulative = cumulative_cost_series(trace);
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    CsvRow row;
    row << s.step << s.time << s.state.x << s.state.vx << s.state.y << s.state.vy << s.input.ax
        << s.input.ay << s.input_prev.ax << s.input_prev.ay << s.y_lane << s.stage_cost << cumulative[k]
        << s.plan_cost << s.slack_used << s.max_violation << s.iterations << s.converged
        << s.solver_failed;
    for (std::size_t i = 0; i < trace.participants.size(); ++i) {
      const auto& pr = s.participants.at(i);
      row << pr.position.x() << pr.position.y() << pr.heading << pr.distance
          << safety_violated(trace, k, i);
      for (std::size_t m = 0; m < trace.participants[i].mode_labels.size(); ++m) {
        const auto& mr = pr.modes.at(m);
        row << pr.probabilities.at(m) << mr.included << mr.beta << mr.scale << mr.active;
      }
    }
    out += row.str();
  }
  return out;
}

json trace_to_json(const SimulationTrace& trace) {
  json participants = json::array();
  for (const auto& p : trace.participants) {
    participants.push_back({{"id", p.id},
                            {"kind", p.kind},
                            {"half_length", p.half_length},
                            {"half_width", p.half_width},
                            {"modes", p.mode_labels}});
  }
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json tps = json::array();
    for (const auto& pr : s.participants) {
      json modes = json::array();
      for (const auto& m : pr.modes) {
        modes.push_back(
            {{"included", m.included}, {"beta", m.beta}, {"scale", m.scale}, {"active", m.active}});
      }
      tps.push_back({{"position", vec_json(pr.position)},
                     {"heading", pr.heading},
                     {"distance", pr.distance},
                     {"opinion", pr.opinion ? opinion_to_json(*pr.opinion) : json(nullptr)},
                     {"probabilities", pr.probabilities},
                     {"modes", modes}});
    }
    steps.push_back({{"step", s.step},
                     {"time", s.time},
                     {"state", state_json(s.state)},
                     {"input", input_json(s.input)},
                     {"input_prev", input_json(s.input_prev)},
                     {"y_lane", s.y_lane},
                     {"stage_cost", s.stage_cost},
                     {"plan_cost", s.plan_cost},
                     {"slack_used", s.slack_used},
                     {"max_violation", s.max_violation},
                     {"iterations", s.iterations},
                     {"converged", s.converged},
                     {"solver_failed", s.solver_failed},
                     {"uniform_fallback", s.uniform_fallback},
                     {"participants", tps}});
  }
  json finals = json::array();
  for (const auto& p : trace.final_participant_positions) finals.push_back(vec_json(p));
  return {{"scenario", trace.scenario},
          {"strategy", trace.strategy},
          {"seed", trace.seed},
          {"planner", planner_config_to_json(trace.planner)},
          {"ego", {{"half_length", trace.ego_half_length}, {"half_width", trace.ego_half_width}}},
          {"safety_margin", trace.safety_margin},
          {"overtake_target", trace.overtake_target},
          {"participants", participants},
          {"steps", steps},
          {"final_state", state_json(trace.final_state)},
          {"final_participant_positions", finals}};
}

SimulationTrace trace_from_json(const json& doc) {
  const std::string root = "<root>";
  if (!doc.is_object()) fail(root, "expected an object");
  SimulationTrace t;
  t.scenario = read<std::string>(doc, "scenario", root);
  t.strategy = read<std::string>(doc, "strategy", root);
  t.seed = read<std::uint64_t>(doc, "seed", root);
  t.planner = planner_config_from_json(field(doc, "planner", root), "planner");
  const auto& ego = field(doc, "ego", root);
  t.ego_half_length = read<double>(ego, "half_length", "ego");
  t.ego_half_width = read<double>(ego, "half_width", "ego");
  t.safety_margin = read<double>(doc, "safety_margin", root);
  t.overtake_target = read<std::string>(doc, "overtake_target", root);

  std::vector<Frame> frames;
  const auto& tps = field(doc, "participants", root);
  if (!tps.is_array()) fail("participants", "expected an array");
  for (std::size_t i = 0; i < tps.size(); ++i) {
    const std::string p = "participants[" + std::to_string(i) + "]";
    ParticipantInfo info;
    info.id = read<std::string>(tps[i], "id", p);
    info.kind = read<std::string>(tps[i], "kind", p);
    info.half_length = read<double>(tps[i], "half_length", p);
    info.half_width = read<double>(tps[i], "half_width", p);
    info.mode_labels = read<std::vector<std::string>>(tps[i], "modes", p);
    try {
      frames.emplace_back(info.mode_labels);
    } catch (const Error& e) {
      fail(p + ".modes", e.what());
    }
    t.participants.push_back(std::move(info));
  }

  const auto& steps = field(doc, "steps", root);
  if (!steps.is_array()) fail("steps", "expected an array");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const std::string sp = "steps[" + std::to_string(k) + "]";
    const auto& sj = steps[k];
    StepRecord s;
    s.step = read<int>(sj, "step", sp);
    s.time = read<double>(sj, "time", sp);
    s.state = state_from(field(sj, "state", sp), sp + ".state");
    s.input = input_from(field(sj, "input", sp), sp + ".input");
    s.input_prev = input_from(field(sj, "input_prev", sp), sp + ".input_prev");
    s.y_lane = read<double>(sj, "y_lane", sp);
    s.stage_cost = read<double>(sj, "stage_cost", sp);
    s.plan_cost = read<double>(sj, "plan_cost", sp);
    s.slack_used = read<double>(sj, "slack_used", sp);
    s.max_violation = read<double>(sj, "max_violation", sp);
    s.iterations = read<int>(sj, "iterations", sp);
    s.converged = read<bool>(sj, "converged", sp);
    s.solver_failed = read<bool>(sj, "solver_failed", sp);
    s.uniform_fallback = read<bool>(sj, "uniform_fallback", sp);
    const auto& prs = field(sj, "participants", sp);
    if (!prs.is_array() || prs.size() != frames.size()) {
      fail(sp + ".participants", "expected one entry per participant");
    }
    for (std::size_t i = 0; i < prs.size(); ++i) {
      const std::string pp = sp + ".participants[" + std::to_string(i) + "]";
      const auto& pj = prs[i];
      ParticipantRecord pr;
      pr.position = vec_from(field(pj, "position", pp), pp + ".position");
      pr.heading = read<double>(pj, "heading", pp);
      pr.distance = read<double>(pj, "distance", pp);
      const auto& oj = field(pj, "opinion", pp);
      if (!oj.is_null()) {
        try {
          pr.opinion = opinion_from_json(oj, frames[i]);
        } catch (const Error& e) {
          fail(pp + ".opinion", e.what());
        }
      }
      pr.probabilities = read<std::vector<double>>(pj, "probabilities", pp);
      const auto& modes = field(pj, "modes", pp);
      if (!modes.is_array() || modes.size() != frames[i].size()) {
        fail(pp + ".modes", "expected one entry per mode");
      }
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const std::string mp = pp + ".modes[" + std::to_string(m) + "]";
        pr.modes.push_back({read<bool>(modes[m], "included", mp), read<double>(modes[m], "beta", mp),
                            read<double>(modes[m], "scale", mp), read<bool>(modes[m], "active", mp)});
      }
      s.participants.push_back(std::move(pr));
    }
    t.steps.push_back(std::move(s));
  }
  t.final_state = state_from(field(doc, "final_state", root), "final_state");
  const auto& finals = field(doc, "final_participant_positions", root);
  if (!finals.is_array()) fail("final_participant_positions", "expected an array");
  for (std::size_t i = 0; i < finals.size(); ++i) {
    t.final_participant_positions.push_back(
        vec_from(finals[i], "final_participant_positions[" + std::to_string(i) + "]"));
  }
  return t;
}

json summary_to_json(const RunSummary& s) {
  json tps = json::array();
  for (std::size_t i = 0; i < s.participant_ids.size(); ++i) {
    tps.push_back({{"id", s.participant_ids[i]},
                   {"min_distance", s.safety.min_distance[i]},
                   {"violations", s.safety.violations[i]},
                   {"passed", static_cast<bool>(s.passed[i])}});
  }
  return {{"scenario", s.scenario},
          {"strategy", s.strategy},
          {"seed", s.seed},
          {"j_sim", s.j_sim},
          {"violation_steps", s.safety.violation_steps},
          {"slack_events", s.safety.slack_events},
          {"solver_failures", s.safety.solver_failures},
          {"overtook_target", s.overtook_target},
          {"min_ax", s.min_ax},
          {"final_x", s.final_x},
          {"participants", tps}};
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + file.string() + "'");
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + file.string() + "'");
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void export_trace(const SimulationTrace& trace, const std::filesystem::path& dir,
                  const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());

  write_text_file(dir / (stem + ".csv"), trace_to_csv(trace));
  write_text_file(dir / (stem + ".json"), trace_to_json(trace).dump(1) + '\n');

  std::string vx = "# time vx\n";
  std::string path = "# x y (ego)\n";
  for (const auto& s : trace.steps) {
    vx += fmt(s.time) + ' ' + fmt(s.state.vx) + '\n';
    path += fmt(s.state.x) + ' ' + fmt(s.state.y) + '\n';
  }
  if (!trace.steps.empty()) path += fmt(trace.final_state.x) + ' ' + fmt(trace.final_state.y) + '\n';
  for (std::size_t i = 0; i < trace.participants.size(); ++i) {
    path += "\n\n# x y (" + trace.participants[i].id + ")\n";
    for (const auto& s : trace.steps) {
      const auto& p = s.participants.at(i).position;
      path += fmt(p.x()) + ' ' + fmt(p.y()) + '\n';
    }
  }
  std::string cost = "# time cumulative_cost\n";
  if (!trace.steps.empty()) {
    const auto series = cumulative_cost_series(trace);
    for (std::size_t k = 0; k < series.size(); ++k) {
      cost += fmt(trace.steps[k].time) + ' ' + fmt(series[k]) + '\n';
    }
  }
  write_text_file(dir / (stem + "_vx.dat"), vx);
  write_text_file(dir / (stem + "_path.dat"), path);
  write_text_file(dir / (stem + "_cost.dat"), cost);
}

SimulationTrace load_trace_file(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, file.string() + ": " + e.what());
  }
  return trace_from_json(doc);
}

}  // namespace bftsmpc
