#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace resforge::geometry {

using Vec2 = Eigen::Vector2d;

template <class T>
using Point = std::array<T, 2>;

/// Closed, strictly convex analytic curve, counter-clockwise, parametrised
/// by t in [0, 2pi). Either an ellipse or a radial Fourier curve
/// r(t) = c0 + sum_m a_m cos(mt) + b_m sin(mt) around a center.
class BoundaryCurve {
 public:
  enum class Kind { Ellipse, Fourier };

  static BoundaryCurve ellipse(Vec2 center, double a, double b, double rotation);
  static BoundaryCurve fourier(Vec2 center, double c0, std::vector<std::array<double, 2>> coeffs);
  static BoundaryCurve circle(Vec2 center, double radius) { return ellipse(center, radius, radius, 0.0); }

  Kind kind() const { return kind_; }
  const Vec2& center() const { return center_; }

  /// gamma(t), templated so Taylor jets (series::FormalSeries) can flow through.
  template <class T>
  Point<T> position(const T& t) const;
  /// gamma'(t).
  template <class T>
  Point<T> velocity(const T& t) const;

  Vec2 point(double t) const;
  Vec2 derivative(double t) const;
  Vec2 second_derivative(double t) const;
  Vec2 unit_tangent(double t) const;
  /// Exterior unit normal (tangent rotated clockwise).
  Vec2 outward_normal(double t) const;
  /// Signed curvature, positive everywhere for an admissible curve.
  double curvature(double t) const;

  double length() const { return length_; }
  /// Arc length from t = 0, extended periodically to all real t.
  double arc_length(double t) const;
  /// Inverse of arc_length; returns t in [0, 2pi).
  double parameter_at(double s) const;

  /// Minkowski gauge of p about the center, minus one: negative inside,
  /// zero on the curve, positive outside. Convex in p.
  double gauge(const Vec2& p) const;
  /// Curve parameter of the radial projection of p (a good Newton start).
  double parameter_hint(const Vec2& p) const;
  double max_radius() const { return max_radius_; }

  /// Rigid motions of the whole curve (rotation about the origin).
  BoundaryCurve rotated(double angle) const;
  BoundaryCurve translated(const Vec2& shift) const;

  nlohmann::json to_json() const;
  /// {"curve": "ellipse", "center": [x, y], "semiaxes": [a, b], "rotation": r}
  /// or {"curve": "fourier", "center": [x, y], "c0": r0, "coeffs": [[a1, b1], ...]}.
  static BoundaryCurve from_json(const nlohmann::json& j);

 private:
  BoundaryCurve() = default;
  void finalize();

  Kind kind_ = Kind::Ellipse;
  Vec2 center_ = Vec2::Zero();
  double a_ = 1.0, b_ = 1.0, rotation_ = 0.0;
  double c0_ = 1.0;
  std::vector<std::array<double, 2>> coeffs_;

  double length_ = 0.0;
  double max_radius_ = 0.0;
  std::vector<double> panel_s_;  // arc length at panel boundaries
};

inline constexpr int kArcPanels = 64;

template <class T>
Point<T> BoundaryCurve::position(const T& t) const {
  using std::cos;
  using std::sin;
  if (kind_ == Kind::Ellipse) {
    const double cr = std::cos(rotation_), sr = std::sin(rotation_);
    const T lx = a_ * cos(t), ly = b_ * sin(t);
    return {cr * lx - sr * ly + center_.x(), sr * lx + cr * ly + center_.y()};
  }
  T r = c0_ + 0.0 * t;
  for (std::size_t m = 1; m <= coeffs_.size(); ++m) {
    const T mt = static_cast<double>(m) * t;
    r = r + coeffs_[m - 1][0] * cos(mt) + coeffs_[m - 1][1] * sin(mt);
  }
  return {r * cos(t) + center_.x(), r * sin(t) + center_.y()};
}

template <class T>
Point<T> BoundaryCurve::velocity(const T& t) const {
  using std::cos;
  using std::sin;
  if (kind_ == Kind::Ellipse) {
    const double cr = std::cos(rotation_), sr = std::sin(rotation_);
    const T lx = -a_ * sin(t), ly = b_ * cos(t);
    return {cr * lx - sr * ly, sr * lx + cr * ly};
  }
  T r = c0_ + 0.0 * t;
  T dr = 0.0 * t;
  for (std::size_t m = 1; m <= coeffs_.size(); ++m) {
    const double md = static_cast<double>(m);
    const T mt = md * t;
    const T c = cos(mt), s = sin(mt);
    r = r + coeffs_[m - 1][0] * c + coeffs_[m - 1][1] * s;
    dr = dr + md * (coeffs_[m - 1][1] * c - coeffs_[m - 1][0] * s);
  }
  const T ct = cos(t), st = sin(t);
  return {dr * ct - r * st, dr * st + r * ct};
}

}  // namespace resforge::geometry
