#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace resforge::series {

/// Univariate power series c_0 + c_1 t + ... + c_N t^N over any field-like
/// scalar T (double, std::complex, multiprecision complex). Products are
/// truncated at t^N where N is the smaller length minus one.
template <class T>
class Univariate {
 public:
  Univariate() = default;
  explicit Univariate(std::size_t order) : c_(order + 1, T(0)) {}
  Univariate(std::size_t order, T constant) : c_(order + 1, T(0)) { c_[0] = constant; }

  std::size_t order() const { return c_.size() - 1; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  T& operator[](std::size_t i) { return c_[i]; }
  /// Coefficient of t^i, zero beyond the stored order.
  T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }

  Univariate& operator+=(const Univariate& o) {
    resize_to(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Univariate& operator-=(const Univariate& o) {
    resize_to(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Univariate& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Univariate operator+(Univariate a, const Univariate& b) { return a += b; }
  friend Univariate operator-(Univariate a, const Univariate& b) { return a -= b; }
  friend Univariate operator*(Univariate a, const T& s) { return a *= s; }
  friend Univariate operator*(const T& s, Univariate a) { return a *= s; }

  friend Univariate operator*(const Univariate& a, const Univariate& b) {
    const std::size_t n = std::min(a.order(), b.order());
    Univariate out(n);
    for (std::size_t i = 0; i <= n; ++i) {
      if (a.c_[i] == T(0)) continue;
      for (std::size_t j = 0; i + j <= n; ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return out;
  }

  /// 1/a; requires a nonzero constant term.
  Univariate reciprocal() const {
    if (c_[0] == T(0)) throw std::domain_error("reciprocal of a series with zero constant term");
    Univariate out(order());
    const T inv = T(1) / c_[0];
    out.c_[0] = inv;
    for (std::size_t m = 1; m <= order(); ++m) {
      T s(0);
      for (std::size_t i = 1; i <= m; ++i) s += c_[i] * out.c_[m - i];
      out.c_[m] = -s * inv;
    }
    return out;
  }

  /// a^e for integer e (negative powers through the reciprocal).
  Univariate pow(int e) const {
    Univariate base = e < 0 ? reciprocal() : *this;
    unsigned k = static_cast<unsigned>(e < 0 ? -e : e);
    Univariate out(order(), T(1));
    while (k) {
      if (k & 1u) out = out * base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return out;
  }

 private:
  void resize_to(const Univariate& o) {
    if (o.c_.size() < c_.size()) c_.resize(o.c_.size());
  }
  std::vector<T> c_;
};

}  // namespace resforge::series
