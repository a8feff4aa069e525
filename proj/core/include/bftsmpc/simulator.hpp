#pragma once

// Closed-loop scenario simulation.

#include <cstdint>
#include <random>
#include <vector>

#include "bftsmpc/opinion.hpp"
#include "bftsmpc/scenario.hpp"
#include "bftsmpc/strategy.hpp"
#include "bftsmpc/trace.hpp"

namespace bftsmpc {

/// Predicted path of one candidate trajectory over steps k = 1..N.
struct ModePrediction {
  std::size_t mode_index = 0;
  std::vector<Vec2> positions;
  std::vector<Mat2> covariances;
  std::vector<double> headings;
};

/// Opinion at time t: keyframe masses interpolated linearly (held constant
/// outside the keyframe span), then, when noise_std > 0, each focal mass is
/// perturbed by N(0, noise_std^2), clipped at zero and the result renormalised.
Opinion sample_opinion(const BeliefSchedule& sched, double t, std::mt19937_64& rng);

/// Next N positions of every mode's nominal trajectory, evaluated at
/// t + k*T for k = 1..N. A pending lateral shift is predicted as starting at t.
std::vector<ModePrediction> predict_modes(const TrafficParticipant& tp, double t, int horizon,
                                          double sampling_time);

/// Runs the closed loop for the scenario's duration. Deterministic in
/// (scenario, strategy, seed). Throws ScenarioInvalid for an invalid scenario.
SimulationTrace run_scenario(const Scenario& sc, const StrategyKind& strategy, std::uint64_t seed);

}  // namespace bftsmpc
