#pragma once

// Elliptical collision-avoidance constraints around predicted TP positions,
// and their uncertainty-driven tightening.

#include <vector>

#include <Eigen/Core>

namespace bftsmpc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Combined half-extents (ego + TP + safety margin) along the world x and y axes.
struct EllipseGeometry {
  double half_length = 0.0;
  double half_width = 0.0;
};

/// Ego and TP footprints are boxes; the TP box is rotated by its heading while
/// the ego is taken as aligned with the x axis.
EllipseGeometry combined_geometry(double ego_half_length, double ego_half_width,
                                  double tp_half_length, double tp_half_width,
                                  double tp_heading, double margin);

struct EllipseConstraint {
  Vec2 center = Vec2::Zero();
  /// Positive-definite weight acting on the position difference.
  Mat2 weight = Mat2::Identity();
  /// Semi-axes along the principal frame (after any scaling).
  Vec2 semi_axes = Vec2::Ones();
  /// Angle of the first principal axis w.r.t. the world x axis, radians.
  double orientation = 0.0;
  /// Risk parameter the ellipse was built for, after clamping.
  double beta = 0.5;
  /// Factor applied to the weight by tightening (1 when untouched).
  double scale = 1.0;
  bool active = true;
};

struct TighteningParams {
  double gamma = 0.5;
  double alpha = 0.1;
  double mu_epsilon = 1e-6;
  double scale_cap = 1e3;

  /// Throws Error(InvalidParameter) unless 0<gamma<1, 0<alpha<1,
  /// mu_epsilon>0 and scale_cap>1/gamma.
  void validate() const;
};

inline constexpr double kBetaFloor = 0.01;
inline constexpr double kBetaCeiling = 0.999;

/// Standard-normal quantile of beta (clamped to [0.01, 0.999]), floored at 0.
double risk_quantile(double beta);

/// Ellipse whose semi-axis along each covariance principal direction is the
/// footprint extent along that direction plus risk_quantile(beta) standard
/// deviations. Throws InvalidCovariance when the covariance is not symmetric
/// positive semidefinite within 1e-9.
EllipseConstraint build_ellipse(const Vec2& center, const Mat2& covariance, double beta,
                                const EllipseGeometry& geometry);

/// sgn(pl - alpha) * (mu / pl)^sgn(pl - alpha). Returns 0 at pl == alpha and
/// -inf when the relaxing branch meets mu == 0. Throws DomainError if mu > pl.
double tightening_exponent(double pl, double mu, double alpha);

/// gamma^lambda for the given plausibility and uncertainty.
double tightening_scale(const TighteningParams& params, double pl, double mu);

/// Scales the weight by gamma^lambda. A relaxed constraint (pl < alpha) is
/// dropped when mu < mu_epsilon or the scale exceeds scale_cap.
EllipseConstraint tighten_ellipse(const EllipseConstraint& c, const TighteningParams& params,
                                  double pl, double mu);

/// (pos - center)^T W (pos - center) - 1; nonnegative iff satisfied.
double evaluate_constraint(const Vec2& pos, const EllipseConstraint& c);

}  // namespace bftsmpc
