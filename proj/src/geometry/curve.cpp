#include "resforge/geometry/curve.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "resforge/errors.hpp"

namespace resforge::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kConvexitySamples = 4096;

double wrap_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  return w < 0.0 ? w + kTwoPi : w;
}

Vec2 json_vec(const nlohmann::json& j, const char* key) {
  auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw ValidationError(key, "needs two entries");
  return {v[0], v[1]};
}

}  // namespace

BoundaryCurve BoundaryCurve::ellipse(Vec2 center, double a, double b, double rotation) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw GeometryError("ellipse semiaxes must be positive");
  }
  BoundaryCurve c;
  c.kind_ = Kind::Ellipse;
  c.center_ = center;
  c.a_ = a;
  c.b_ = b;
  c.rotation_ = rotation;
  c.finalize();
  return c;
}

BoundaryCurve BoundaryCurve::fourier(Vec2 center, double c0, std::vector<std::array<double, 2>> coeffs) {
  if (!(c0 > 0.0)) throw GeometryError("Fourier curve needs c0 > 0");
  BoundaryCurve c;
  c.kind_ = Kind::Fourier;
  c.center_ = center;
  c.c0_ = c0;
  c.coeffs_ = std::move(coeffs);
  c.finalize();
  return c;
}

void BoundaryCurve::finalize() {
  max_radius_ = 0.0;
  for (int i = 0; i < kConvexitySamples; ++i) {
    const double t = kTwoPi * i / kConvexitySamples;
    const double k = curvature(t);
    if (!(k > 0.0) || derivative(t).norm() <= 0.0) {
      throw GeometryError("curve is not strictly convex (curvature " + std::to_string(k) + " at t = " +
                          std::to_string(t) + ")");
    }
    max_radius_ = std::max(max_radius_, (point(t) - center_).norm());
  }
  // Sampled maximum; pad it so it bounds the curve between samples too.
  max_radius_ *= 1.001;
  panel_s_.assign(kArcPanels + 1, 0.0);
  auto speed = [this](double t) { return derivative(t).norm(); };
  for (int p = 0; p < kArcPanels; ++p) {
    const double lo = kTwoPi * p / kArcPanels, hi = kTwoPi * (p + 1) / kArcPanels;
    panel_s_[p + 1] = panel_s_[p] + boost::math::quadrature::gauss<double, 20>::integrate(speed, lo, hi);
  }
  length_ = panel_s_.back();
}

Vec2 BoundaryCurve::point(double t) const {
  auto p = position(t);
  return {p[0], p[1]};
}

Vec2 BoundaryCurve::derivative(double t) const {
  auto v = velocity(t);
  return {v[0], v[1]};
}

Vec2 BoundaryCurve::second_derivative(double t) const {
  if (kind_ == Kind::Ellipse) {
    const double cr = std::cos(rotation_), sr = std::sin(rotation_);
    const double lx = -a_ * std::cos(t), ly = -b_ * std::sin(t);
    return {cr * lx - sr * ly, sr * lx + cr * ly};
  }
  double r = c0_, dr = 0.0, ddr = 0.0;
  for (std::size_t m = 1; m <= coeffs_.size(); ++m) {
    const double md = static_cast<double>(m);
    const double c = std::cos(md * t), s = std::sin(md * t);
    const double am = coeffs_[m - 1][0], bm = coeffs_[m - 1][1];
    r += am * c + bm * s;
    dr += md * (bm * c - am * s);
    ddr -= md * md * (am * c + bm * s);
  }
  const double ct = std::cos(t), st = std::sin(t);
  return {ddr * ct - 2.0 * dr * st - r * ct, ddr * st + 2.0 * dr * ct - r * st};
}

Vec2 BoundaryCurve::unit_tangent(double t) const { return derivative(t).normalized(); }

Vec2 BoundaryCurve::outward_normal(double t) const {
  const Vec2 tau = unit_tangent(t);
  return {tau.y(), -tau.x()};
}

double BoundaryCurve::curvature(double t) const {
  const Vec2 d1 = derivative(t), d2 = second_derivative(t);
  const double sp = d1.norm();
  return (d1.x() * d2.y() - d1.y() * d2.x()) / (sp * sp * sp);
}

double BoundaryCurve::arc_length(double t) const {
  const double turns = std::floor(t / kTwoPi);
  const double w = t - turns * kTwoPi;
  int p = std::min(kArcPanels - 1, static_cast<int>(w / (kTwoPi / kArcPanels)));
  const double lo = kTwoPi * p / kArcPanels;
  auto speed = [this](double u) { return derivative(u).norm(); };
  const double partial = w > lo ? boost::math::quadrature::gauss<double, 20>::integrate(speed, lo, w) : 0.0;
  return turns * length_ + panel_s_[p] + partial;
}

double BoundaryCurve::parameter_at(double s) const {
  double w = std::fmod(s, length_);
  if (w < 0.0) w += length_;
  auto it = std::upper_bound(panel_s_.begin(), panel_s_.end(), w);
  int p = std::clamp(static_cast<int>(it - panel_s_.begin()) - 1, 0, kArcPanels - 1);
  const double lo = kTwoPi * p / kArcPanels, hi = kTwoPi * (p + 1) / kArcPanels;
  double t = lo + (w - panel_s_[p]) / (panel_s_[p + 1] - panel_s_[p]) * (hi - lo);
  for (int it2 = 0; it2 < 50; ++it2) {
    const double step = (arc_length(t) - w) / derivative(t).norm();
    t -= step;
    if (std::abs(step) < 1e-15 * kTwoPi) break;
  }
  return wrap_angle(t);
}

double BoundaryCurve::gauge(const Vec2& p) const {
  const Vec2 q = p - center_;
  if (kind_ == Kind::Ellipse) {
    const double cr = std::cos(rotation_), sr = std::sin(rotation_);
    const double lx = cr * q.x() + sr * q.y(), ly = -sr * q.x() + cr * q.y();
    return std::hypot(lx / a_, ly / b_) - 1.0;
  }
  const double rho = q.norm();
  if (rho == 0.0) return -1.0;
  const double th = std::atan2(q.y(), q.x());
  double r = c0_;
  for (std::size_t m = 1; m <= coeffs_.size(); ++m) {
    r += coeffs_[m - 1][0] * std::cos(m * th) + coeffs_[m - 1][1] * std::sin(m * th);
  }
  return rho / r - 1.0;
}

double BoundaryCurve::parameter_hint(const Vec2& p) const {
  const Vec2 q = p - center_;
  if (kind_ == Kind::Ellipse) {
    const double cr = std::cos(rotation_), sr = std::sin(rotation_);
    const double lx = cr * q.x() + sr * q.y(), ly = -sr * q.x() + cr * q.y();
    return wrap_angle(std::atan2(ly / b_, lx / a_));
  }
  return wrap_angle(std::atan2(q.y(), q.x()));
}

BoundaryCurve BoundaryCurve::rotated(double angle) const {
  const Eigen::Rotation2Dd R(angle);
  const Vec2 c = R * center_;
  if (kind_ == Kind::Ellipse) return ellipse(c, a_, b_, rotation_ + angle);
  // r'(t) = r(t - angle) around the rotated center.
  std::vector<std::array<double, 2>> rc;
  for (std::size_t m = 1; m <= coeffs_.size(); ++m) {
    const double cm = std::cos(m * angle), sm = std::sin(m * angle);
    const double am = coeffs_[m - 1][0], bm = coeffs_[m - 1][1];
    rc.push_back({am * cm - bm * sm, am * sm + bm * cm});
  }
  return fourier(c, c0_, rc);
}

BoundaryCurve BoundaryCurve::translated(const Vec2& shift) const {
  BoundaryCurve c = *this;
  c.center_ += shift;
  return c;
}

nlohmann::json BoundaryCurve::to_json() const {
  if (kind_ == Kind::Ellipse) {
    return {{"curve", "ellipse"},
            {"center", {center_.x(), center_.y()}},
            {"semiaxes", {a_, b_}},
            {"rotation", rotation_}};
  }
  nlohmann::json co = nlohmann::json::array();
  for (const auto& ab : coeffs_) co.push_back({ab[0], ab[1]});
  return {{"curve", "fourier"}, {"center", {center_.x(), center_.y()}}, {"c0", c0_}, {"coeffs", co}};
}

BoundaryCurve BoundaryCurve::from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("curve").get<std::string>();
    const Vec2 center = j.contains("center") ? json_vec(j, "center") : Vec2::Zero();
    if (kind == "ellipse") {
      const Vec2 ax = json_vec(j, "semiaxes");
      if (ax.x() < ax.y()) throw ValidationError("semiaxes", "expected a >= b > 0");
      return ellipse(center, ax.x(), ax.y(), j.value("rotation", 0.0));
    }
    if (kind == "circle") return circle(center, j.at("radius").get<double>());
    if (kind == "fourier") {
      std::vector<std::array<double, 2>> co;
      for (const auto& ab : j.value("coeffs", nlohmann::json::array())) {
        auto v = ab.get<std::vector<double>>();
        if (v.size() != 2) throw ValidationError("coeffs", "each entry needs [a_m, b_m]");
        co.push_back({v[0], v[1]});
      }
      return fourier(center, j.at("c0").get<double>(), co);
    }
    throw ValidationError("curve", "unknown curve kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("curve", e.what());
  }
}

}  // namespace resforge::geometry
