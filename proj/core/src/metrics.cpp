#include "bftsmpc/metrics.hpp"

#include <algorithm>
#include <limits>

#include "bftsmpc/error.hpp"
#include "bftsmpc/risk_constraints.hpp"
#include "compensated_sum.hpp"

namespace bftsmpc {

namespace {

double realised_stage_cost(const SimulationTrace& trace, const StepRecord& s) {
  PlannerConfig cfg = trace.planner;
  cfg.y_lane = s.y_lane;
  return stage_cost(s.state, s.input, s.input_prev, cfg);
}

void require_steps(const SimulationTrace& trace) {
  if (trace.steps.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no steps");
}

}  // namespace

double cumulative_cost(const SimulationTrace& trace) {
  require_steps(trace);
  detail::CompensatedSum sum;
  for (const auto& s : trace.steps) sum += realised_stage_cost(trace, s);
  return sum.value();
}

std::vector<double> cumulative_cost_series(const SimulationTrace& trace) {
  require_steps(trace);
  std::vector<double> out;
  out.reserve(trace.steps.size());
  detail::CompensatedSum sum;
  for (const auto& s : trace.steps) {
    sum += realised_stage_cost(trace, s);
    out.push_back(sum.value());
  }
  return out;
}

bool safety_violated(const SimulationTrace& trace, std::size_t step, std::size_t participant) {
  const auto& info = trace.participants.at(participant);
  const auto& rec = trace.steps.at(step);
  const auto& pr = rec.participants.at(participant);
  const auto geom = combined_geometry(trace.ego_half_length, trace.ego_half_width, info.half_length,
                                      info.half_width, pr.heading, trace.safety_margin);
  const auto ellipse = build_ellipse(pr.position, Mat2::Zero(), 0.5, geom);
  return evaluate_constraint(rec.state.position(), ellipse) < 0.0;
}

SafetyReport safety_report(const SimulationTrace& trace) {
  require_steps(trace);
  const auto n = trace.participants.size();
  SafetyReport r;
  r.min_distance.assign(n, std::numeric_limits<double>::infinity());
  r.violations.assign(n, 0);
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (s.participants.at(i).position - s.state.position()).norm();
      r.min_distance[i] = std::min(r.min_distance[i], d);
      if (safety_violated(trace, k, i)) {
        ++r.violations[i];
        any = true;
      }
    }
    if (any) ++r.violation_steps;
    if (s.slack_used > kSlackEventThreshold) ++r.slack_events;
    if (s.solver_failed) ++r.solver_failures;
  }
  return r;
}

RunSummary summarize(const SimulationTrace& trace) {
  RunSummary out;
  out.scenario = trace.scenario;
  out.strategy = trace.strategy;
  out.seed = trace.seed;
  out.j_sim = cumulative_cost(trace);
  out.safety = safety_report(trace);
  out.final_x = trace.final_state.x;
  for (std::size_t i = 0; i < trace.participants.size(); ++i) {
    out.participant_ids.push_back(trace.participants[i].id);
    const bool passed = i < trace.final_participant_positions.size() &&
                        trace.final_state.x > trace.final_participant_positions[i].x();
    out.passed.push_back(passed);
    if (trace.participants[i].id == trace.overtake_target) out.overtook_target = passed;
  }
  out.min_ax = std::numeric_limits<double>::infinity();
  for (const auto& s : trace.steps) out.min_ax = std::min(out.min_ax, s.input.ax);
  return out;
}

}  // namespace bftsmpc
