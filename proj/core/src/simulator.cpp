#include "bftsmpc/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "bftsmpc/error.hpp"
#include "bftsmpc/risk_constraints.hpp"

namespace bftsmpc {

namespace {

MassMap interpolated_masses(const BeliefSchedule& sched, double t) {
  const auto& kfs = sched.keyframes;
  const auto to_map = [](const Opinion& o) {
    MassMap m;
    for (const auto& [s, v] : o.focal()) m[s] = v;
    return m;
  };
  if (t <= kfs.front().time) return to_map(kfs.front().opinion);
  if (t >= kfs.back().time) return to_map(kfs.back().opinion);
  const auto upper = std::upper_bound(kfs.begin(), kfs.end(), t,
                                      [](double v, const BeliefKeyframe& k) { return v < k.time; });
  const auto& b = *upper;
  const auto& a = *(upper - 1);
  const double w = (t - a.time) / (b.time - a.time);
  MassMap m;
  for (const auto& [s, v] : a.opinion.focal()) m[s] += (1.0 - w) * v;
  for (const auto& [s, v] : b.opinion.focal()) m[s] += w * v;
  return m;
}

std::mt19937_64 participant_rng(std::uint64_t run_seed, std::uint64_t schedule_seed,
                                std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(run_seed), static_cast<std::uint32_t>(run_seed >> 32),
                    static_cast<std::uint32_t>(schedule_seed),
                    static_cast<std::uint32_t>(schedule_seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

}  // namespace

Opinion sample_opinion(const BeliefSchedule& sched, double t, std::mt19937_64& rng) {
  if (sched.keyframes.empty()) throw Error(ErrorCode::ScenarioInvalid, "belief schedule is empty");
  const Frame& frame = sched.keyframes.front().opinion.frame();
  MassMap masses = interpolated_masses(sched, t);
  if (sched.noise_std <= 0.0) return validate_opinion(frame, masses, true);

  std::normal_distribution<double> noise(0.0, sched.noise_std);
  double total = 0.0;
  for (auto& [s, v] : masses) {
    v = std::max(0.0, v + noise(rng));
    total += v;
  }
  // Noise wiped every focal mass: keep the noiseless interpolation.
  if (!(total > 0.0)) return validate_opinion(frame, interpolated_masses(sched, t), true);
  return validate_opinion(frame, masses, true);
}

std::vector<ModePrediction> predict_modes(const TrafficParticipant& tp, double t, int horizon,
                                          double sampling_time) {
  std::vector<ModePrediction> out(tp.modes.size());
  for (std::size_t i = 0; i < tp.modes.size(); ++i) {
    const auto& mode = tp.modes[i];
    auto& pred = out[i];
    pred.mode_index = i;
    for (int k = 1; k <= horizon; ++k) {
      const double tk = t + k * sampling_time;
      pred.positions.push_back(mode.predicted_position(t, tk));
      pred.headings.push_back(mode.heading(tk));
      pred.covariances.push_back(tp.covariance_at(k));
    }
  }
  return out;
}

SimulationTrace run_scenario(const Scenario& sc, const StrategyKind& strategy, std::uint64_t seed) {
  validate_scenario(sc);
  strategy.validate();
  const PlannerConfig& cfg = sc.planner;
  const double dt = cfg.sampling_time;
  const auto n_tp = sc.participants.size();

  SimulationTrace trace;
  trace.scenario = sc.name;
  trace.strategy = strategy.name();
  trace.seed = seed;
  trace.planner = cfg;
  trace.ego_half_length = sc.ego.half_length;
  trace.ego_half_width = sc.ego.half_width;
  trace.safety_margin = sc.safety_margin;
  trace.overtake_target = sc.overtake_target;
  for (const auto& tp : sc.participants) {
    ParticipantInfo info{tp.id, std::string(to_string(tp.kind)), tp.half_length, tp.half_width, {}};
    for (const auto& m : tp.modes) info.mode_labels.push_back(m.label);
    trace.participants.push_back(std::move(info));
  }

  std::vector<std::mt19937_64> rngs;
  for (std::size_t i = 0; i < n_tp; ++i) {
    rngs.push_back(participant_rng(seed, sc.participants[i].belief.rng_seed, i));
  }

  RecedingHorizonPlanner planner(cfg);
  PlannerConfig step_cfg = cfg;
  EgoState state = sc.ego.initial;
  EgoInput u_prev{};
  trace.steps.reserve(static_cast<std::size_t>(sc.duration_steps));

  for (int step = 0; step < sc.duration_steps; ++step) {
    const double t = step * dt;
    StepRecord rec;
    rec.step = step;
    rec.time = t;
    rec.state = state;
    rec.input_prev = u_prev;

    rec.y_lane = sc.lane_reference(state.y);
    planner.set_lane_reference(rec.y_lane);
    step_cfg.y_lane = rec.y_lane;

    ConstraintSet constraints(static_cast<std::size_t>(cfg.horizon));
    for (std::size_t i = 0; i < n_tp; ++i) {
      const auto& tp = sc.participants[i];
      ParticipantRecord pr;
      pr.position = tp.position(t);
      pr.heading = tp.heading(t);
      pr.distance = (pr.position - state.position()).norm();
      Opinion opinion = sample_opinion(tp.belief, t, rngs[i]);
      const RiskAssignment risk = assign_risk(strategy, opinion);
      rec.uniform_fallback = rec.uniform_fallback || risk.uniform_fallback;
      pr.probabilities = risk.probabilities;
      pr.opinion = std::move(opinion);

      const auto preds = predict_modes(tp, t, cfg.horizon, dt);
      for (std::size_t m = 0; m < tp.modes.size(); ++m) {
        const ModeRisk& mr = risk.modes[m];
        ModeRecord mrec{mr.included, mr.beta, 1.0, mr.included};
        if (mr.included) {
          for (int k = 0; k < cfg.horizon; ++k) {
            const auto geom = combined_geometry(sc.ego.half_length, sc.ego.half_width,
                                                tp.half_length, tp.half_width,
                                                preds[m].headings[k], sc.safety_margin);
            EllipseConstraint c = build_ellipse(preds[m].positions[k], preds[m].covariances[k],
                                                mr.beta, geom);
            if (mr.tighten) {
              c = tighten_ellipse(c, strategy.tightening, mr.tighten->plausibility,
                                  mr.tighten->uncertainty);
            }
            if (k == 0) {
              mrec.scale = c.scale;
              mrec.active = c.active;
            }
            if (c.active) constraints[static_cast<std::size_t>(k)].push_back(c);
          }
        }
        pr.modes.push_back(mrec);
      }
      rec.participants.push_back(std::move(pr));
    }

    EgoInput u = u_prev;
    try {
      auto [u0, plan] = planner.step(state, u_prev, constraints);
      u = u0;
      rec.plan_cost = plan.cost;
      rec.slack_used = plan.slack_used;
      rec.max_violation = plan.max_constraint_violation;
      rec.iterations = plan.iterations;
      rec.converged = plan.converged;
    } catch (const Error&) {
      // Failsafe: hold the previous input.
      rec.solver_failed = true;
      planner.reset();
    }
    rec.input = u;
    rec.stage_cost = stage_cost(state, u, u_prev, step_cfg);
    trace.steps.push_back(std::move(rec));

    state = step_dynamics(state, u, dt);
    u_prev = u;
  }

  trace.final_state = state;
  const double t_end = sc.duration_steps * dt;
  for (const auto& tp : sc.participants) trace.final_participant_positions.push_back(tp.position(t_end));
  return trace;
}

}  // namespace bftsmpc
