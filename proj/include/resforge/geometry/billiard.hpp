#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resforge/geometry/curve.hpp"
#include "resforge/series/map_germ.hpp"

namespace resforge::geometry {

/// Two disjoint convex obstacles and their trapped ray.
struct ObstaclePair {
  BoundaryCurve omega1;
  BoundaryCurve omega2;
  /// Length of the trapped segment.
  double d = 0.0;
  /// Curve parameters of the feet.
  double t1 = 0.0, t2 = 0.0;
  /// Arc-length coordinates of the feet (a1 on omega1, a2 on omega2).
  double a1 = 0.0, a2 = 0.0;
  Vec2 foot1, foot2;
  /// max(|<u, tau_1>|, |<u, tau_2>|) for the unit foot-to-foot vector u.
  double normality_residual = 0.0;
};

/// Point of T*(boundary of omega1): arc length s and tangential momentum
/// xi = <direction, unit tangent>.
struct PhasePoint {
  double s = 0.0;
  double xi = 0.0;
};

/// Obstacle file contents: {"obstacles": [curve1, curve2]} or a bare
/// two-element array of curve objects.
std::pair<BoundaryCurve, BoundaryCurve> obstacles_from_json(const nlohmann::json& j);
nlohmann::json obstacles_to_json(const BoundaryCurve& omega1, const BoundaryCurve& omega2);

/// Global minimum of the boundary-to-boundary distance: 720 x 720 parameter
/// scan, Newton refinement, double-normality certificate.
ObstaclePair trapped_ray(const BoundaryCurve& omega1, const BoundaryCurve& omega2);

struct RayHit {
  double t = 0.0;
  double ell = 0.0;
  Vec2 point;
};

/// First intersection of p + ell v (ell > 0, |v| = 1) with the curve, or
/// nullopt when the ray misses. Throws GlancingError for tangential contact.
std::optional<RayHit> intersect_ray(const BoundaryCurve& c, const Vec2& p, const Vec2& v);

inline constexpr double kGlancingTol = 1e-9;

/// kappa = kappa_2 o kappa_1. nullopt means Escaped. The image s is wrapped
/// into [a1 - L/2, a1 + L/2). Throws GlancingError on tangential incidence
/// and ValidationError for |xi| >= 1.
std::optional<PhasePoint> billiard_map(const ObstaclePair& P, const PhasePoint& rho);
/// kappa^{-1} = J kappa J with J(s, xi) = (s, -xi).
std::optional<PhasePoint> inverse_billiard_map(const ObstaclePair& P, const PhasePoint& rho);

struct Linearization {
  double nu = 0.0;
  Eigen::Matrix2d jacobian;
  double det = 0.0;
  /// Max entry difference between Richardson estimates at steps h and h/2.
  double step_agreement = 0.0;
};

/// Jacobian of kappa at (a1, 0) by Richardson-extrapolated central differences.
/// Throws HyperbolicityError unless the eigenvalues are nu > 1 and 1/nu.
Linearization poincare_linearization(const ObstaclePair& P, double step = 5e-4);

struct KappaGerm {
  /// Germ in aligned coordinates, linear part diag(nu, 1/nu).
  series::SymplecticMapGerm aligned;
  /// Germ in (s - a1, xi).
  series::SymplecticMapGerm raw;
  /// (s - a1, xi) = P (x, xi_hat).
  Eigen::Matrix2d P;
  double nu = 0.0;
  /// Max |germ - billiard_map| over the validation circles, per radius.
  std::vector<double> validation_errors;
};

inline const std::vector<double> kGermRadii{1e-2, 5e-3, 2.5e-3};

/// Taylor germ of kappa at (a1, 0), computed by propagating Taylor jets
/// through arc-length inversion, both ray-curve intersections and the
/// reflection, then conjugated to the eigenbasis (scaled so time reversal
/// becomes (x, xi) -> +-(xi, x)). Validated against billiard_map samples on
/// circles of the radii above; throws GermFitError if the error does not
/// shrink at the rate the order predicts.
KappaGerm kappa_germ(const ObstaclePair& P, int order);

/// Time reversal in aligned coordinates.
Eigen::Matrix2d aligned_time_reversal(const KappaGerm& g);

}  // namespace resforge::geometry
