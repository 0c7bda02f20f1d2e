#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "resforge/errors.hpp"
#include "resforge/geometry/billiard.hpp"

namespace resforge::geometry {

namespace {

using series::FormalSeries;
using series::Truncation;
using Jet = FormalSeries;
using JetPoint = Point<Jet>;

struct JetFrame {
  JetPoint position;
  JetPoint tangent;  // unit
  JetPoint normal;   // outward unit
};

JetFrame frame(const BoundaryCurve& c, const Jet& t) {
  JetFrame f{c.position(t), c.velocity(t), c.velocity(t)};
  const Jet inv_speed = reciprocal(sqrt(f.tangent[0] * f.tangent[0] + f.tangent[1] * f.tangent[1]));
  f.tangent = {f.tangent[0] * inv_speed, f.tangent[1] * inv_speed};
  f.normal = {f.tangent[1], -f.tangent[0]};
  return f;
}

Jet dot(const JetPoint& a, const JetPoint& b) { return a[0] * b[0] + a[1] * b[1]; }

/// Solves c(t0 + u) = p + ell v for jets (u, ell) from the exact zeroth-order
/// solution (0, ell0). Newton on jets gains at least one order per step.
std::pair<Jet, Jet> intersect_jet(const BoundaryCurve& c, double t0, const JetPoint& p, const JetPoint& v,
                                  double ell0, int order) {
  const Jet zero(p[0].nvars(), p[0].truncation());
  Jet u = zero, ell = zero + ell0;
  for (int it = 0; it < order + 2; ++it) {
    const Jet t = u + t0;
    const JetPoint g = c.position(t), dg = c.velocity(t);
    const Jet fx = g[0] - p[0] - ell * v[0];
    const Jet fy = g[1] - p[1] - ell * v[1];
    // [dg, -v] (du, dl) = -f, by Cramer's rule.
    const Jet inv_det = reciprocal(v[0] * dg[1] - dg[0] * v[1]);
    const Jet du = (fx * v[1] - fy * v[0]) * inv_det;
    const Jet dl = (dg[1] * fx - dg[0] * fy) * inv_det;
    u = u + du;
    ell = ell + dl;
  }
  return {u, ell};
}

/// Horner evaluation of sum_k coeffs[k] x^k.
Jet poly(const std::vector<double>& coeffs, const Jet& x) {
  Jet out(x.nvars(), x.truncation());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) out = out * x + *it;
  return out;
}

Jet strip_constant(const Jet& j) { return j - j.constant_term(); }

}  // namespace

Eigen::Matrix2d aligned_time_reversal(const KappaGerm& g) {
  const Eigen::Matrix2d J = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  return g.P.inverse() * J * g.P;
}

KappaGerm kappa_germ(const ObstaclePair& P, int order) {
  if (order < 1 || order > 8) throw ValidationError("order", "germ order must lie in 1..8");
  const auto& c1 = P.omega1;
  const auto& c2 = P.omega2;
  const Truncation tr = Truncation::degree(order);
  const int N = order;

  // Arc length relative to the foot as a polynomial in tau = t - t1:
  // S(tau) = sum_{k>=1} speed_{k-1} tau^k / k.
  const Truncation tr1 = Truncation::degree(N + 1);
  const Jet tau1 = Jet::variable(1, tr1, 0);
  const JetPoint vel = c1.velocity(tau1 + P.t1);
  const Jet speed = sqrt(vel[0] * vel[0] + vel[1] * vel[1]);
  std::vector<double> S(N + 2, 0.0);
  for (int k = 1; k <= N + 1; ++k) {
    const int e = k - 1;
    S[k] = speed.coeff(std::span<const int>(&e, 1)).real() / k;
  }

  const Jet sigma = Jet::variable(2, tr, 0);
  const Jet xi = Jet::variable(2, tr, 1);

  // Invert S: tau with S(tau) = sigma.
  Jet tau = sigma / S[1];
  for (int it = 0; it < N + 1; ++it) tau = tau - (poly(S, tau) - sigma) / S[1];

  const JetFrame f1 = frame(c1, tau + P.t1);
  const Jet eta = sqrt(1.0 - xi * xi);
  const JetPoint v = {xi * f1.tangent[0] + eta * f1.normal[0], xi * f1.tangent[1] + eta * f1.normal[1]};

  const auto [u2, ell2] = intersect_jet(c2, P.t2, f1.position, v, P.d, N);
  const JetFrame f2 = frame(c2, u2 + P.t2);
  const JetPoint q = {f1.position[0] + ell2 * v[0], f1.position[1] + ell2 * v[1]};
  const Jet vn = dot(v, f2.normal);
  const JetPoint w = {v[0] - 2.0 * vn * f2.normal[0], v[1] - 2.0 * vn * f2.normal[1]};

  const auto [u1, ell1] = intersect_jet(c1, P.t1, q, w, P.d, N);
  const JetFrame f3 = frame(c1, u1 + P.t1);

  std::vector<Jet> comps{strip_constant(poly(S, u1)), strip_constant(dot(w, f3.tangent))};
  KappaGerm out{series::SymplecticMapGerm(1, N, comps), series::SymplecticMapGerm(1, N, comps),
                Eigen::Matrix2d::Identity(), 0.0, {}};

  // Eigenbasis, scaled so det P = 1 and time reversal becomes +-swap.
  const Eigen::Matrix2d L = out.raw.linear_part();
  const double tr2 = L.trace(), det = L.determinant();
  const double disc = tr2 * tr2 - 4.0 * det;
  if (!(disc > 0.0) || !(tr2 > 2.0)) throw HyperbolicityError("germ linear part is not hyperbolic");
  out.nu = 0.5 * (tr2 + std::sqrt(disc));
  Eigen::Vector2d eu;
  // (L - nu) e = 0; pick the better-conditioned row.
  if (std::abs(L(0, 1)) + std::abs(L(0, 0) - out.nu) >= std::abs(L(1, 0)) + std::abs(L(1, 1) - out.nu)) {
    eu = Eigen::Vector2d(L(0, 1), out.nu - L(0, 0));
  } else {
    eu = Eigen::Vector2d(out.nu - L(1, 1), L(1, 0));
  }
  eu.normalize();
  const double pq = eu[0] * eu[1];
  if (std::abs(pq) < 1e-12) throw GermFitError("unstable direction is parallel to a coordinate axis", std::abs(pq));
  const double c = 1.0 / std::sqrt(2.0 * std::abs(pq));
  const double sgn = pq > 0.0 ? -1.0 : 1.0;
  out.P.col(0) = c * eu;
  out.P.col(1) = sgn * c * Eigen::Vector2d(eu[0], -eu[1]);
  const Eigen::Matrix2d Pinv = out.P.inverse();

  const Jet x = Jet::variable(2, tr, 0), y = Jet::variable(2, tr, 1);
  const std::vector<Jet> sub{out.P(0, 0) * x + out.P(0, 1) * y, out.P(1, 0) * x + out.P(1, 1) * y};
  const Jet k0 = compose(comps[0], sub), k1 = compose(comps[1], sub);
  out.aligned = series::SymplecticMapGerm(1, N, {Pinv(0, 0) * k0 + Pinv(0, 1) * k1, Pinv(1, 0) * k0 + Pinv(1, 1) * k1});

  // Validation against the map itself on shrinking circles.
  constexpr int kAngles = 16;
  for (double r : kGermRadii) {
    double err = 0.0;
    for (int a = 0; a < kAngles; ++a) {
      const double th = 2.0 * std::numbers::pi * (a + 0.5) / kAngles;
      const double ds = r * std::cos(th), dxi = r * std::sin(th);
      const auto img = billiard_map(P, {P.a1 + ds, dxi});
      if (!img) throw GermFitError("billiard map escaped inside the validation disc", r);
      const auto g = out.raw.evaluate_real({ds, dxi});
      err = std::max({err, std::abs(g[0] - (img->s - P.a1)), std::abs(g[1] - img->xi)});
    }
    out.validation_errors.push_back(err);
  }
  // Accept if every error is at roundoff level, or if the error shrinks at
  // least as fast as the first omitted order predicts wherever it is measurable.
  constexpr double kAbsoluteTol = 1e-10;
  constexpr double kNoiseFloor = 1e-11;
  const auto& e = out.validation_errors;
  bool ok = true;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (e[i] <= kAbsoluteTol || e[i + 1] <= kNoiseFloor) continue;
    const double rate = std::log(e[i] / e[i + 1]) / std::log(kGermRadii[i] / kGermRadii[i + 1]);
    if (rate < N + 1 - 0.5) ok = false;
  }
  if (!ok) {
    const double worst = *std::max_element(out.validation_errors.begin(), out.validation_errors.end());
    throw GermFitError("germ disagrees with sampled billiard map (max error " + std::to_string(worst) + ")", worst);
  }
  return out;
}

}  // namespace resforge::geometry
