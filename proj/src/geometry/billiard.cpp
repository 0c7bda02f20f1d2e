#include "resforge/geometry/billiard.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "resforge/errors.hpp"

namespace resforge::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kScan = 720;

double wrap_near(double s, double center, double L) {
  double w = std::fmod(s - center + 0.5 * L, L);
  if (w < 0.0) w += L;
  return center - 0.5 * L + w;
}

}  // namespace

std::pair<BoundaryCurve, BoundaryCurve> obstacles_from_json(const nlohmann::json& j) {
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (!j.contains("obstacles")) throw ValidationError("obstacles", "missing obstacle list");
    list = &j.at("obstacles");
  }
  if (!list->is_array() || list->size() != 2) {
    throw ValidationError("obstacles", "expected exactly two curve objects");
  }
  return {BoundaryCurve::from_json((*list)[0]), BoundaryCurve::from_json((*list)[1])};
}

nlohmann::json obstacles_to_json(const BoundaryCurve& omega1, const BoundaryCurve& omega2) {
  return {{"obstacles", {omega1.to_json(), omega2.to_json()}}};
}

ObstaclePair trapped_ray(const BoundaryCurve& omega1, const BoundaryCurve& omega2) {
  std::vector<Vec2> p1(kScan), p2(kScan);
  for (int i = 0; i < kScan; ++i) {
    const double t = kTwoPi * i / kScan;
    p1[i] = omega1.point(t);
    p2[i] = omega2.point(t);
    if (omega2.gauge(p1[i]) <= 0.0 || omega1.gauge(p2[i]) <= 0.0) {
      throw GeometryError("obstacles overlap or touch");
    }
  }
  if (omega2.gauge(omega1.center()) <= 0.0 || omega1.gauge(omega2.center()) <= 0.0) {
    throw GeometryError("one obstacle contains the other");
  }
  int bi = 0, bj = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    for (int j = 0; j < kScan; ++j) {
      const double dist = (p1[i] - p2[j]).squaredNorm();
      if (dist < best) {
        best = dist;
        bi = i;
        bj = j;
      }
    }
  }
  const double grid_min = std::sqrt(best);
  if (grid_min < 1e-9) throw GeometryError("obstacles touch");

  // Newton on the gradient of f = |g1(t) - g2(u)|^2 / 2, damped by backtracking.
  double t = kTwoPi * bi / kScan, u = kTwoPi * bj / kScan;
  auto f = [&](double tt, double uu) { return 0.5 * (omega1.point(tt) - omega2.point(uu)).squaredNorm(); };
  for (int it = 0; it < 100; ++it) {
    const Vec2 D = omega1.point(t) - omega2.point(u);
    const Vec2 d1 = omega1.derivative(t), d2 = omega2.derivative(u);
    const Vec2 dd1 = omega1.second_derivative(t), dd2 = omega2.second_derivative(u);
    const Eigen::Vector2d g(D.dot(d1), -D.dot(d2));
    Eigen::Matrix2d H;
    H << d1.dot(d1) + D.dot(dd1), -d1.dot(d2), -d1.dot(d2), d2.dot(d2) - D.dot(dd2);
    Eigen::Vector2d step = -H.ldlt().solve(g);
    if (!step.allFinite() || H.determinant() <= 0.0) step = -0.1 * g;
    double lam = 1.0;
    const double f0 = f(t, u);
    while (lam > 1e-6 && f(t + lam * step[0], u + lam * step[1]) > f0 + 1e-30) lam *= 0.5;
    t += lam * step[0];
    u += lam * step[1];
    if (step.norm() * lam < 1e-15) break;
  }
  ObstaclePair P{omega1, omega2, 0.0, 0.0, 0.0, 0.0, 0.0, Vec2::Zero(), Vec2::Zero(), 0.0};
  P.t1 = std::fmod(std::fmod(t, kTwoPi) + kTwoPi, kTwoPi);
  P.t2 = std::fmod(std::fmod(u, kTwoPi) + kTwoPi, kTwoPi);
  P.foot1 = omega1.point(P.t1);
  P.foot2 = omega2.point(P.t2);
  P.d = (P.foot2 - P.foot1).norm();
  P.a1 = omega1.arc_length(P.t1);
  P.a2 = omega2.arc_length(P.t2);
  const Vec2 dir = (P.foot2 - P.foot1) / P.d;
  P.normality_residual = std::max(std::abs(dir.dot(omega1.unit_tangent(P.t1))), std::abs(dir.dot(omega2.unit_tangent(P.t2))));
  if (P.normality_residual > 1e-10) {
    throw GeometryError("trapped ray failed the double-normality certificate (residual " +
                        std::to_string(P.normality_residual) + ")");
  }
  if (dir.dot(omega1.outward_normal(P.t1)) <= 0.0 || dir.dot(omega2.outward_normal(P.t2)) >= 0.0) {
    throw GeometryError("trapped segment does not leave both obstacles outward");
  }
  if (P.d > grid_min + 1e-12) {
    throw GeometryError("refined distance " + std::to_string(P.d) + " exceeds the coarse-grid minimum " +
                        std::to_string(grid_min) + "; global minimum not certified");
  }
  return P;
}

std::optional<RayHit> intersect_ray(const BoundaryCurve& c, const Vec2& p, const Vec2& v) {
  auto h = [&](double ell) { return c.gauge(p + ell * v); };
  if (h(0.0) < -1e-12) throw GeometryError("ray starts inside the obstacle");
  // Cheap rejection against the bounding disc.
  const Vec2 to_c = c.center() - p;
  const double along = to_c.dot(v);
  const double R = c.max_radius() * (1.0 + 1e-9);
  if (to_c.squaredNorm() > R * R && (along <= 0.0 || to_c.squaredNorm() - along * along > R * R)) {
    return std::nullopt;
  }
  const double ell_max = (p - c.center()).norm() + 2.0 * c.max_radius();
  const auto [ell_min, h_min] = boost::math::tools::brent_find_minima(h, 0.0, ell_max, 52);
  if (h_min > 0.0) return std::nullopt;
  double ell = ell_min;
  if (h(0.0) > 0.0 && h_min < 0.0) {
    boost::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); };
    const auto br = boost::math::tools::toms748_solve(h, 0.0, ell_min, h(0.0), h_min, tol, iters);
    ell = 0.5 * (br.first + br.second);
  }
  // Polish on the curve itself: gamma(t) = p + ell v.
  double t = c.parameter_hint(p + ell * v);
  for (int it = 0; it < 30; ++it) {
    const Vec2 F = c.point(t) - p - ell * v;
    Eigen::Matrix2d J;
    J.col(0) = c.derivative(t);
    J.col(1) = -v;
    const Eigen::Vector2d step = J.fullPivLu().solve(-F);
    if (!step.allFinite()) break;
    t += step[0];
    ell += step[1];
    if (step.norm() < 1e-15 * std::max(1.0, ell)) break;
  }
  if (!(ell > 0.0)) return std::nullopt;
  const double cosang = v.dot(c.outward_normal(t));
  if (std::abs(cosang) < kGlancingTol) throw GlancingError("ray meets the obstacle tangentially");
  t = std::fmod(std::fmod(t, kTwoPi) + kTwoPi, kTwoPi);
  return RayHit{t, ell, c.point(t)};
}

std::optional<PhasePoint> billiard_map(const ObstaclePair& P, const PhasePoint& rho) {
  if (!(std::abs(rho.xi) < 1.0)) throw ValidationError("xi", "billiard map needs |xi| < 1");
  const auto& c1 = P.omega1;
  const auto& c2 = P.omega2;
  const double t = c1.parameter_at(rho.s);
  const Vec2 p = c1.point(t);
  const Vec2 v = rho.xi * c1.unit_tangent(t) + std::sqrt(1.0 - rho.xi * rho.xi) * c1.outward_normal(t);
  const auto hit2 = intersect_ray(c2, p, v);
  if (!hit2) return std::nullopt;
  const Vec2 n2 = c2.outward_normal(hit2->t);
  const Vec2 w = v - 2.0 * v.dot(n2) * n2;
  const auto hit1 = intersect_ray(c1, hit2->point, w);
  if (!hit1) return std::nullopt;
  const double s = wrap_near(c1.arc_length(hit1->t), P.a1, c1.length());
  return PhasePoint{s, w.dot(c1.unit_tangent(hit1->t))};
}

std::optional<PhasePoint> inverse_billiard_map(const ObstaclePair& P, const PhasePoint& rho) {
  auto img = billiard_map(P, {rho.s, -rho.xi});
  if (!img) return std::nullopt;
  return PhasePoint{img->s, -img->xi};
}

Linearization poincare_linearization(const ObstaclePair& P, double step) {
  if (!(step > 0.0)) throw ValidationError("step", "finite-difference step must be positive");
  auto eval = [&](double ds, double dxi) {
    auto img = billiard_map(P, {P.a1 + ds, dxi});
    if (!img) throw HyperbolicityError("billiard map undefined next to the trapped ray");
    return Eigen::Vector2d(img->s - P.a1, img->xi);
  };
  auto central = [&](double h) {
    Eigen::Matrix2d D;
    D.col(0) = (eval(h, 0.0) - eval(-h, 0.0)) / (2.0 * h);
    D.col(1) = (eval(0.0, h) - eval(0.0, -h)) / (2.0 * h);
    return D;
  };
  const Eigen::Matrix2d D1 = central(step), D2 = central(step / 2), D3 = central(step / 4);
  const Eigen::Matrix2d R1 = (4.0 * D2 - D1) / 3.0, R2 = (4.0 * D3 - D2) / 3.0;
  const Eigen::Matrix2d J = (16.0 * R2 - R1) / 15.0;
  Linearization out;
  out.jacobian = J;
  out.det = J.determinant();
  out.step_agreement = (R1 - R2).cwiseAbs().maxCoeff();
  const double tr = J.trace();
  const double disc = tr * tr - 4.0 * out.det;
  if (!(disc > 0.0) || !(tr > 2.0)) {
    throw HyperbolicityError("Poincare map eigenvalues are not real, positive and off the unit circle (trace " +
                             std::to_string(tr) + ")");
  }
  out.nu = 0.5 * (tr + std::sqrt(disc));
  return out;
}

}  // namespace resforge::geometry
