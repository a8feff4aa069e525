#include "bftsmpc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bftsmpc/error.hpp"

namespace bftsmpc {
namespace {

// Soft penalty of an inequality h >= backoff and its derivative w.r.t. h.
struct Penalty {
  double value = 0.0;
  double dh = 0.0;
};

Penalty soft_penalty(double h, const SolverSettings& s) {
  const double v = s.constraint_backoff - h;
  if (v <= 0.0) return {};
  return {s.penalty_linear * v + s.penalty_quadratic * v * v,
          -(s.penalty_linear + 2.0 * s.penalty_quadratic * v)};
}

using Vec4 = Eigen::Vector4d;

Vec4 as_vec(const EgoState& s) { return {s.x, s.vx, s.y, s.vy}; }

Vec4 state_delta(const EgoState& s, const PlannerConfig& cfg) {
  return as_vec(s) - as_vec(cfg.reference());
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return (project(x - g, lo, hi) - x).lpNorm<Eigen::Infinity>();
}

}  // namespace

void PlannerConfig::validate() const {
  std::ostringstream msg;
  if (horizon < 1) msg << "horizon=" << horizon << " must be >= 1; ";
  if (!(sampling_time > 0.0)) msg << "sampling_time must be positive; ";
  if ((q_diag.array() < 0.0).any() || (p_diag.array() < 0.0).any() ||
      (r_diag.array() < 0.0).any() || (s_diag.array() < 0.0).any()) {
    msg << "cost weights must be nonnegative; ";
  }
  if (!(state_bounds.y_min < state_bounds.y_max)) msg << "empty lateral position bounds; ";
  if (!(state_bounds.vx_min < state_bounds.vx_max)) msg << "empty longitudinal velocity bounds; ";
  if (!(state_bounds.vy_max > 0.0)) msg << "lateral velocity bound must be positive; ";
  if (!(input_bounds.ax_min < input_bounds.ax_max)) msg << "empty longitudinal input bounds; ";
  if (!(input_bounds.ay_max > 0.0)) msg << "lateral input bound must be positive; ";
  if (solver.max_iterations < 1) msg << "solver needs at least one iteration; ";
  if (!(solver.tolerance > 0.0)) msg << "solver tolerance must be positive; ";
  if (solver.penalty_linear < 0.0 || solver.penalty_quadratic < 0.0) {
    msg << "slack weights must be nonnegative; ";
  }
  if (solver.constraint_backoff < 0.0) msg << "constraint backoff must be nonnegative; ";
  if (!msg.str().empty()) throw Error(ErrorCode::InvalidParameter, msg.str());
}

EgoState step_dynamics(const EgoState& s, const EgoInput& u, double t) {
  const double half_t2 = 0.5 * t * t;
  return {s.x + s.vx * t + half_t2 * u.ax, s.vx + u.ax * t, s.y + s.vy * t + half_t2 * u.ay,
          s.vy + u.ay * t};
}

double stage_cost(const EgoState& s, const EgoInput& u, const EgoInput& u_prev,
                  const PlannerConfig& cfg) {
  const Vec4 d = state_delta(s, cfg);
  const double dax = u.ax - u_prev.ax;
  const double day = u.ay - u_prev.ay;
  return d.cwiseAbs2().dot(cfg.q_diag) + cfg.r_diag[0] * u.ax * u.ax +
         cfg.r_diag[1] * u.ay * u.ay + cfg.s_diag[0] * dax * dax + cfg.s_diag[1] * day * day;
}

double terminal_cost(const EgoState& s, const PlannerConfig& cfg) {
  return state_delta(s, cfg).cwiseAbs2().dot(cfg.p_diag);
}

Eigen::VectorXd stack_inputs(const std::vector<EgoInput>& inputs) {
  Eigen::VectorXd v(2 * static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    v[2 * k] = inputs[k].ax;
    v[2 * k + 1] = inputs[k].ay;
  }
  return v;
}

std::vector<EgoInput> unstack_inputs(const Eigen::VectorXd& v) {
  std::vector<EgoInput> inputs(static_cast<std::size_t>(v.size() / 2));
  for (std::size_t k = 0; k < inputs.size(); ++k) inputs[k] = {v[2 * k], v[2 * k + 1]};
  return inputs;
}

SoftObjective::SoftObjective(const EgoState& s0, const EgoInput& u_prev,
                             const ConstraintSet& constraints, const PlannerConfig& cfg)
    : s0_(s0), u_prev_(u_prev), constraints_(constraints), cfg_(cfg) {
  if (static_cast<int>(constraints_.size()) != cfg_.horizon) {
    throw Error(ErrorCode::InvalidParameter,
                "constraint set has " + std::to_string(constraints_.size()) +
                    " steps, horizon is " + std::to_string(cfg_.horizon));
  }
  lower_.resize(dimension());
  upper_.resize(dimension());
  for (int k = 0; k < cfg_.horizon; ++k) {
    lower_[2 * k] = cfg_.input_bounds.ax_min;
    upper_[2 * k] = cfg_.input_bounds.ax_max;
    lower_[2 * k + 1] = -cfg_.input_bounds.ay_max;
    upper_[2 * k + 1] = cfg_.input_bounds.ay_max;
  }
}

std::vector<EgoState> SoftObjective::rollout(const Eigen::VectorXd& inputs) const {
  std::vector<EgoState> states;
  states.reserve(static_cast<std::size_t>(cfg_.horizon) + 1);
  states.push_back(s0_);
  for (int k = 0; k < cfg_.horizon; ++k) {
    states.push_back(
        step_dynamics(states.back(), {inputs[2 * k], inputs[2 * k + 1]}, cfg_.sampling_time));
  }
  return states;
}

double SoftObjective::tracking_cost(const Eigen::VectorXd& inputs) const {
  const auto states = rollout(inputs);
  const auto u = unstack_inputs(inputs);
  double j = terminal_cost(states.back(), cfg_);
  EgoInput prev = u_prev_;
  for (int k = 0; k < cfg_.horizon; ++k) {
    j += stage_cost(states[k], u[k], prev, cfg_);
    prev = u[k];
  }
  return j;
}

ConstraintReport SoftObjective::constraint_report(const std::vector<EgoState>& states) const {
  ConstraintReport r;
  const auto& b = cfg_.state_bounds;
  auto account = [&r](double h) {
    const double v = std::max(0.0, -h);
    r.max_violation = std::max(r.max_violation, v);
    r.total_slack += v;
  };
  for (int k = 1; k <= cfg_.horizon; ++k) {
    const auto& s = states[k];
    for (double h : {s.y - b.y_min, b.y_max - s.y, s.vx - b.vx_min, b.vx_max - s.vx,
                     s.vy + b.vy_max, b.vy_max - s.vy}) {
      account(h);
    }
    for (const auto& c : constraints_[k - 1]) {
      if (c.active) account(evaluate_constraint(s.position(), c));
    }
  }
  return r;
}

double SoftObjective::operator()(const Eigen::VectorXd& inputs, Eigen::VectorXd* grad) const {
  const int n = cfg_.horizon;
  const double t = cfg_.sampling_time;
  const auto states = rollout(inputs);
  const auto& b = cfg_.state_bounds;
  const auto& ss = cfg_.solver;

  // dphi/dx_k for k = 1..N, accumulated before the backward sweep.
  std::vector<Vec4> dstate(static_cast<std::size_t>(n) + 1, Vec4::Zero());
  double value = 0.0;

  EgoInput prev = u_prev_;
  for (int k = 0; k <= n; ++k) {
    const Vec4 d = state_delta(states[k], cfg_);
    const Eigen::Vector4d& w = (k < n) ? cfg_.q_diag : cfg_.p_diag;
    value += d.cwiseAbs2().dot(w);
    if (k > 0) dstate[k] += 2.0 * w.cwiseProduct(d);
    if (k < n) {
      const double ax = inputs[2 * k];
      const double ay = inputs[2 * k + 1];
      value += cfg_.r_diag[0] * ax * ax + cfg_.r_diag[1] * ay * ay +
               cfg_.s_diag[0] * (ax - prev.ax) * (ax - prev.ax) +
               cfg_.s_diag[1] * (ay - prev.ay) * (ay - prev.ay);
      prev = {ax, ay};
    }
    if (k == 0) continue;

    const auto& s = states[k];
    // State bounds: (h, index of the state component, dh/dcomponent).
    const struct {
      double h;
      int idx;
      double sign;
    } bounds[] = {{s.y - b.y_min, 2, 1.0},   {b.y_max - s.y, 2, -1.0},
                  {s.vx - b.vx_min, 1, 1.0}, {b.vx_max - s.vx, 1, -1.0},
                  {s.vy + b.vy_max, 3, 1.0}, {b.vy_max - s.vy, 3, -1.0}};
    for (const auto& bd : bounds) {
      const auto p = soft_penalty(bd.h, ss);
      value += p.value;
      dstate[k][bd.idx] += p.dh * bd.sign;
    }
    for (const auto& c : constraints_[k - 1]) {
      if (!c.active) continue;
      const Vec2 diff = s.position() - c.center;
      const Vec2 wd = c.weight * diff;
      const auto p = soft_penalty(diff.dot(wd) - 1.0, ss);
      if (p.value == 0.0) continue;
      value += p.value;
      dstate[k][0] += p.dh * 2.0 * wd.x();
      dstate[k][2] += p.dh * 2.0 * wd.y();
    }
  }

  if (grad != nullptr) {
    grad->resize(2 * n);
    const double half_t2 = 0.5 * t * t;
    Vec4 lambda = Vec4::Zero();  // adjoint of x_{k+1}
    for (int k = n - 1; k >= 0; --k) {
      // lambda_{k+1} = dphi/dx_{k+1} + A^T lambda_{k+2}
      Vec4 next = dstate[k + 1];
      next[0] += lambda[0];
      next[1] += t * lambda[0] + lambda[1];
      next[2] += lambda[2];
      next[3] += t * lambda[2] + lambda[3];
      lambda = next;

      for (int axis = 0; axis < 2; ++axis) {
        const int i = 2 * k + axis;
        const double u = inputs[i];
        const double u_before = (k == 0) ? (axis == 0 ? u_prev_.ax : u_prev_.ay) : inputs[i - 2];
        double g = 2.0 * cfg_.r_diag[axis] * u + 2.0 * cfg_.s_diag[axis] * (u - u_before);
        if (k + 1 < n) g -= 2.0 * cfg_.s_diag[axis] * (inputs[i + 2] - u);
        g += half_t2 * lambda[2 * axis] + t * lambda[2 * axis + 1];
        (*grad)[i] = g;
      }
    }
  }
  return value;
}

PlanResult solve_ocp(const EgoState& s0, const EgoInput& u_prev, const ConstraintSet& constraints,
                     const PlannerConfig& cfg,
                     const std::optional<std::vector<EgoInput>>& warm_start) {
  cfg.validate();
  const SoftObjective phi(s0, u_prev, constraints, cfg);
  const int n = phi.dimension();
  const auto& lo = phi.lower_bounds();
  const auto& hi = phi.upper_bounds();
  const auto& settings = cfg.solver;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (warm_start && static_cast<int>(warm_start->size()) == cfg.horizon) {
    x = stack_inputs(*warm_start);
  }
  x = project(x, lo, hi);

  Eigen::VectorXd g(n);
  double f = phi(x, &g);
  if (!std::isfinite(f) || !g.allFinite()) {
    throw Error(ErrorCode::NonFiniteModel, "objective or gradient is not finite");
  }

  PlanResult result;
  result.merit_history.push_back(f);

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool fresh_metric = true;
  int iter = 0;
  double residual = projected_gradient_norm(x, g, lo, hi);

  while (iter < settings.max_iterations && residual > settings.tolerance) {
    // Variables pinned at a bound with the gradient pushing outward stay fixed.
    const double eps = std::min(1e-8, residual);
    std::vector<bool> free(static_cast<std::size_t>(n), true);
    for (int i = 0; i < n; ++i) {
      if ((x[i] <= lo[i] + eps && g[i] > 0.0) || (x[i] >= hi[i] - eps && g[i] < 0.0)) {
        free[i] = false;
      }
    }
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (!free[i]) continue;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        if (free[j]) acc -= h_inv(i, j) * g[j];
      }
      d[i] = acc;
    }
    if (!(g.dot(d) < 0.0)) {
      h_inv.setIdentity();
      fresh_metric = true;
      for (int i = 0; i < n; ++i) d[i] = free[i] ? -g[i] : 0.0;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    Eigen::VectorXd g_new(n);
    double f_new = f;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
      x_new = project(x + step * d, lo, hi);
      f_new = phi(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * g.dot(x_new - x) && f_new <= f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh_metric) break;  // steepest descent made no progress either
      h_inv.setIdentity();
      fresh_metric = true;
      continue;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_metric) h_inv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i_n = Eigen::MatrixXd::Identity(n, n);
      h_inv = (i_n - rho * s * y.transpose()) * h_inv * (i_n - rho * y * s.transpose()) +
              rho * s * s.transpose();
      fresh_metric = false;
    }
    x = x_new;
    g = g_new;
    f = f_new;
    ++iter;
    result.merit_history.push_back(f);
    residual = projected_gradient_norm(x, g, lo, hi);
  }

  result.inputs = unstack_inputs(x);
  result.predicted_states = phi.rollout(x);
  result.cost = phi.tracking_cost(x);
  result.objective = f;
  const auto report = phi.constraint_report(result.predicted_states);
  result.max_constraint_violation = report.max_violation;
  result.slack_used = report.total_slack;
  result.stationarity = residual;
  result.iterations = iter;
  result.converged = residual <= settings.tolerance;
  return result;
}

RecedingHorizonPlanner::RecedingHorizonPlanner(PlannerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

std::pair<EgoInput, PlanResult> RecedingHorizonPlanner::step(const EgoState& s0,
                                                             const EgoInput& u_prev,
                                                             const ConstraintSet& constraints) {
  std::optional<std::vector<EgoInput>> warm;
  if (previous_) {
    std::vector<EgoInput> shifted(previous_->begin() + 1, previous_->end());
    shifted.push_back(previous_->back());
    warm = std::move(shifted);
  }
  auto result = solve_ocp(s0, u_prev, constraints, cfg_, warm);
  previous_ = result.inputs;
  const EgoInput applied = result.inputs.front();
  return {applied, std::move(result)};
}

}  // namespace bftsmpc
