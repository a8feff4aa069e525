#pragma once

// Finite-horizon optimal control for a planar double-integrator ego vehicle.
//
// The problem is transcribed by single shooting: the decision vector stacks the
// N inputs [ax_0, ay_0, ..., ax_{N-1}, ay_{N-1}], states are obtained by
// rollout, and every state-bound or ellipse inequality h >= 0 is softened with
// a slack penalised by w1*s + w2*s^2. Input bounds are hard and enforced by
// projection. The soft problem is minimised with a projected BFGS method
// (quasi-Newton on the free variables, backtracking Armijo search along the
// projected path).

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bftsmpc/risk_constraints.hpp"

namespace bftsmpc {

struct EgoState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const EgoState&, const EgoState&) = default;
};

struct EgoInput {
  double ax = 0.0;
  double ay = 0.0;

  friend bool operator==(const EgoInput&, const EgoInput&) = default;
};

struct StateBounds {
  double y_min = -1e3;
  double y_max = 1e3;
  double vx_min = 0.0;
  double vx_max = 60.0;
  double vy_max = 3.0;
};

struct InputBounds {
  double ax_min = -4.0;
  double ax_max = 4.0;
  double ay_max = 2.0;
};

struct SolverSettings {
  int max_iterations = 200;
  /// Projected-gradient (stationarity) residual, infinity norm.
  double tolerance = 1e-6;
  /// w1: linear slack weight.
  double penalty_linear = 1e3;
  /// w2: quadratic slack weight.
  double penalty_quadratic = 1e4;
  /// Each soft constraint h >= 0 is penalised as h >= backoff, so a solve that
  /// stops a little short of the optimum still lands on the feasible side.
  double constraint_backoff = 1e-3;
};

struct PlannerConfig {
  int horizon = 8;
  double sampling_time = 0.2;
  /// Diagonals of Q, P (over [x, vx, y, vy]) and R, S (over [ax, ay]).
  Eigen::Vector4d q_diag{0.0, 1.0, 1.0, 1.0};
  Eigen::Vector4d p_diag{0.0, 1.0, 1.0, 1.0};
  Eigen::Vector2d r_diag{0.1, 0.1};
  Eigen::Vector2d s_diag{0.1, 10.0};
  double v_ref = 20.0;
  double y_lane = 0.0;
  StateBounds state_bounds;
  InputBounds input_bounds;
  SolverSettings solver;

  /// Throws Error(InvalidParameter) with every violated invariant listed.
  void validate() const;
  EgoState reference() const { return {0.0, v_ref, y_lane, 0.0}; }
};

/// Ellipses per prediction step: element k-1 holds the constraints on the
/// predicted state at step k, k = 1..N.
using ConstraintSet = std::vector<std::vector<EllipseConstraint>>;

struct PlanResult {
  std::vector<EgoInput> inputs;
  std::vector<EgoState> predicted_states;
  /// Quadratic tracking cost without slack penalties.
  double cost = 0.0;
  /// cost + slack penalties, the quantity the solver minimises.
  double objective = 0.0;
  double max_constraint_violation = 0.0;
  double slack_used = 0.0;
  /// Final projected-gradient infinity norm.
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Merit value of every accepted iterate, starting with the initial guess.
  std::vector<double> merit_history;
};

/// Exact zero-order-hold double integrator.
EgoState step_dynamics(const EgoState& s, const EgoInput& u, double sampling_time);

/// ||s - ref||_Q^2 + ||u||_R^2 + ||u - u_prev||_S^2 with ref = [0, v_ref, y_lane, 0].
double stage_cost(const EgoState& s, const EgoInput& u, const EgoInput& u_prev,
                  const PlannerConfig& cfg);

/// ||s - ref||_P^2.
double terminal_cost(const EgoState& s, const PlannerConfig& cfg);

struct ConstraintReport {
  double max_violation = 0.0;
  double total_slack = 0.0;
};

/// Soft-constrained objective over the stacked input vector. Exposed so the
/// gradient can be checked independently of the solver.
class SoftObjective {
 public:
  SoftObjective(const EgoState& s0, const EgoInput& u_prev, const ConstraintSet& constraints,
                const PlannerConfig& cfg);

  int dimension() const { return 2 * cfg_.horizon; }

  /// Objective value; fills the analytic (adjoint) gradient when grad != nullptr.
  double operator()(const Eigen::VectorXd& inputs, Eigen::VectorXd* grad = nullptr) const;
  double tracking_cost(const Eigen::VectorXd& inputs) const;
  std::vector<EgoState> rollout(const Eigen::VectorXd& inputs) const;
  /// Violation of the hard inequalities (h >= 0, no backoff) along a rollout.
  ConstraintReport constraint_report(const std::vector<EgoState>& states) const;

  const Eigen::VectorXd& lower_bounds() const { return lower_; }
  const Eigen::VectorXd& upper_bounds() const { return upper_; }

 private:
  EgoState s0_;
  EgoInput u_prev_;
  ConstraintSet constraints_;
  PlannerConfig cfg_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

Eigen::VectorXd stack_inputs(const std::vector<EgoInput>& inputs);
std::vector<EgoInput> unstack_inputs(const Eigen::VectorXd& v);

/// Solves the soft-constrained OCP. Warm starts from `warm_start` (clamped to
/// the input box) or from zeros. Throws NonFiniteModel when the objective or
/// its gradient is not finite at the initial guess.
PlanResult solve_ocp(const EgoState& s0, const EgoInput& u_prev, const ConstraintSet& constraints,
                     const PlannerConfig& cfg,
                     const std::optional<std::vector<EgoInput>>& warm_start = std::nullopt);

/// Stateful receding-horizon wrapper: each step warm starts from the previous
/// solution shifted by one (last input repeated).
class RecedingHorizonPlanner {
 public:
  explicit RecedingHorizonPlanner(PlannerConfig cfg);

  std::pair<EgoInput, PlanResult> step(const EgoState& s0, const EgoInput& u_prev,
                                       const ConstraintSet& constraints);
  void reset() { previous_.reset(); }
  void set_lane_reference(double y_lane) { cfg_.y_lane = y_lane; }
  const std::optional<std::vector<EgoInput>>& previous_solution() const { return previous_; }
  const PlannerConfig& config() const { return cfg_; }

 private:
  PlannerConfig cfg_;
  std::optional<std::vector<EgoInput>> previous_;
};

}  // namespace bftsmpc
