#include "bftsmpc/risk_constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/erf.hpp>

#include "bftsmpc/error.hpp"

namespace bftsmpc {
namespace {

constexpr double kPsdTolerance = 1e-9;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

EllipseGeometry combined_geometry(double ego_half_length, double ego_half_width,
                                  double tp_half_length, double tp_half_width,
                                  double tp_heading, double margin) {
  const double c = std::abs(std::cos(tp_heading));
  const double s = std::abs(std::sin(tp_heading));
  return {ego_half_length + c * tp_half_length + s * tp_half_width + margin,
          ego_half_width + s * tp_half_length + c * tp_half_width + margin};
}

void TighteningParams::validate() const {
  std::ostringstream msg;
  if (!(gamma > 0.0 && gamma < 1.0)) msg << "gamma=" << gamma << " not in (0,1); ";
  if (!(alpha > 0.0 && alpha < 1.0)) msg << "alpha=" << alpha << " not in (0,1); ";
  if (!(mu_epsilon > 0.0)) msg << "mu_epsilon=" << mu_epsilon << " not positive; ";
  if (gamma > 0.0 && !(scale_cap > 1.0 / gamma)) {
    msg << "scale_cap=" << scale_cap << " not above 1/gamma; ";
  }
  if (!msg.str().empty()) throw Error(ErrorCode::InvalidParameter, msg.str());
}

double risk_quantile(double beta) {
  const double b = std::clamp(beta, kBetaFloor, kBetaCeiling);
  const double q = std::sqrt(2.0) * boost::math::erf_inv(2.0 * b - 1.0);
  return std::max(0.0, q);
}

EllipseConstraint build_ellipse(const Vec2& center, const Mat2& covariance, double beta,
                                const EllipseGeometry& geometry) {
  if (!covariance.allFinite() ||
      std::abs(covariance(0, 1) - covariance(1, 0)) > kPsdTolerance) {
    throw Error(ErrorCode::InvalidCovariance, "covariance is not symmetric");
  }
  const Mat2 sym = 0.5 * (covariance + covariance.transpose());

  Mat2 axes = Mat2::Identity();
  Vec2 variances(sym(0, 0), sym(1, 1));
  const double scale = std::max({1.0, std::abs(sym(0, 0)), std::abs(sym(1, 1))});
  if (std::abs(sym(0, 1)) > 1e-12 * scale) {
    Eigen::SelfAdjointEigenSolver<Mat2> eig(sym);
    axes = eig.eigenvectors();
    variances = eig.eigenvalues();
  }
  if (variances.minCoeff() < -kPsdTolerance) {
    std::ostringstream msg;
    msg << "covariance has negative eigenvalue " << variances.minCoeff();
    throw Error(ErrorCode::InvalidCovariance, msg.str());
  }

  const double q = risk_quantile(beta);
  EllipseConstraint c;
  c.center = center;
  c.beta = std::clamp(beta, kBetaFloor, kBetaCeiling);
  for (int k = 0; k < 2; ++k) {
    const Vec2 dir = axes.col(k);
    const double extent =
        std::abs(dir.x()) * geometry.half_length + std::abs(dir.y()) * geometry.half_width;
    c.semi_axes[k] = extent + q * std::sqrt(std::max(0.0, variances[k]));
  }
  if (!(c.semi_axes.minCoeff() > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "ellipse needs a positive footprint");
  }
  const Vec2 inv_sq = c.semi_axes.cwiseAbs2().cwiseInverse();
  c.weight = axes * inv_sq.asDiagonal() * axes.transpose();
  c.orientation = std::atan2(axes(1, 0), axes(0, 0));
  return c;
}

double tightening_exponent(double pl, double mu, double alpha) {
  if (!(mu >= 0.0) || !(pl >= 0.0) || mu > pl + 1e-12) {
    std::ostringstream msg;
    msg << "need 0 <= mu <= pl, got mu=" << mu << " pl=" << pl;
    throw Error(ErrorCode::DomainError, msg.str());
  }
  switch (sign(pl - alpha)) {
    case 0:
      return 0.0;
    case 1:
      return std::min(1.0, mu / pl);
    default:
      if (mu == 0.0) return -std::numeric_limits<double>::infinity();
      return -(pl / mu);
  }
}

double tightening_scale(const TighteningParams& params, double pl, double mu) {
  return std::pow(params.gamma, tightening_exponent(pl, mu, params.alpha));
}

EllipseConstraint tighten_ellipse(const EllipseConstraint& c, const TighteningParams& params,
                                  double pl, double mu) {
  EllipseConstraint out = c;
  if (!c.active) return out;
  const double s = tightening_scale(params, pl, mu);
  out.scale = std::min(s, std::numeric_limits<double>::max());
  if (pl < params.alpha && (mu < params.mu_epsilon || s > params.scale_cap)) {
    out.active = false;
    return out;
  }
  out.weight = s * c.weight;
  out.semi_axes = c.semi_axes / std::sqrt(s);
  return out;
}

double evaluate_constraint(const Vec2& pos, const EllipseConstraint& c) {
  const Vec2 d = pos - c.center;
  return d.dot(c.weight * d) - 1.0;
}

}  // namespace bftsmpc
