#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace resforge::series {

using Complex = std::complex<double>;

/// Exponent vector (up to kMaxVars variables) together with a power of the
/// semiclassical parameter h, packed into one 64-bit key. Six bits per
/// exponent; multiplication of monomials is integer addition of keys.
class Monomial {
 public:
  static constexpr int kMaxVars = 8;
  static constexpr int kMaxExponent = 63;

  Monomial() = default;
  explicit Monomial(std::span<const int> exponents, int hpow = 0);

  static Monomial from_key(std::uint64_t key) {
    Monomial m;
    m.key_ = key;
    return m;
  }

  int exponent(int var) const { return static_cast<int>((key_ >> (kBits * var)) & kMask); }
  int hpow() const { return static_cast<int>((key_ >> kHShift) & 0xff); }
  int degree() const;
  std::vector<int> exponents(int nvars) const;
  std::uint64_t key() const { return key_; }

  Monomial times(Monomial other) const { return from_key(key_ + other.key_); }
  Monomial with_exponent(int var, int e) const;
  Monomial with_hpow(int hpow) const;

  auto operator<=>(const Monomial&) const = default;

 private:
  static constexpr int kBits = 6;
  static constexpr std::uint64_t kMask = 63;
  static constexpr int kHShift = 48;
  std::uint64_t key_ = 0;
};

/// Rule deciding which (phase degree, h-power) pairs a series keeps.
///
/// A term is kept iff `hpow <= h_cap` and
/// `degree_weight * degree + h_weight * hpow <= cap`. Three presets cover
/// the uses in this library:
///  - degree(cap):  plain total-degree cap, h-power capped separately;
///  - two_graded(r): h^j terms kept up to phase degree 2(r - j);
///  - weighted(r):  action polynomials, degree + hpow <= r.
class Truncation {
 public:
  static Truncation degree(int cap, int h_cap = 0);
  static Truncation two_graded(int order);
  static Truncation weighted(int cap);

  bool keeps(int degree, int hpow) const {
    return degree >= 0 && hpow <= h_cap_ && degree_weight_ * degree + h_weight_ * hpow <= cap_;
  }
  /// Largest phase degree kept at the given h-power, or -1.
  int max_degree(int hpow) const;
  int h_cap() const { return h_cap_; }
  int cap() const { return cap_; }

  /// Tightest rule satisfied by both operands. Throws DimensionError when
  /// the weights differ (incompatible gradings).
  Truncation meet(const Truncation& other) const;

  bool operator==(const Truncation&) const = default;

 private:
  Truncation(int dw, int hw, int cap, int h_cap) : degree_weight_(dw), h_weight_(hw), cap_(cap), h_cap_(h_cap) {}
  int degree_weight_ = 1;
  int h_weight_ = 0;
  int cap_ = 0;
  int h_cap_ = 0;
};

/// Truncated multivariate power series with complex coefficients and an
/// additional grading by powers of h. Values are immutable in practice: every
/// operation returns a new, re-truncated and pruned series.
class FormalSeries {
 public:
  using TermMap = std::map<Monomial, Complex>;

  /// Relative magnitude below which coefficients are dropped (per grade).
  static constexpr double kPruneFloor = 1e-14;

  FormalSeries(int nvars, Truncation truncation);

  static FormalSeries constant(int nvars, Truncation truncation, Complex value);
  static FormalSeries variable(int nvars, Truncation truncation, int index, Complex scale = 1.0);
  static FormalSeries monomial(int nvars, Truncation truncation, std::span<const int> exponents,
                               Complex coeff, int hpow = 0);

  int nvars() const { return nvars_; }
  const Truncation& truncation() const { return truncation_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Complex coeff(std::span<const int> exponents, int hpow = 0) const;
  Complex coeff(Monomial m) const;
  Complex constant_term() const;

  /// Highest phase degree present (-1 for the zero series).
  int max_degree() const;
  double max_abs() const;

  /// Terms of the given phase degree (all h-powers).
  FormalSeries homogeneous_part(int degree) const;
  /// Terms whose phase degree lies in [lo, hi].
  FormalSeries degree_range(int lo, int hi) const;
  FormalSeries derivative(int var) const;
  FormalSeries scaled(Complex factor) const;
  FormalSeries with_truncation(Truncation truncation) const;

  Complex evaluate(std::span<const Complex> point, Complex h = 0.0) const;

  /// Adds `coeff` to the given monomial (truncation and pruning applied).
  void add_term(Monomial m, Complex coeff);

  FormalSeries operator-() const { return scaled(-1.0); }
  FormalSeries& operator+=(const FormalSeries& other);
  FormalSeries& operator-=(const FormalSeries& other);

 private:
  friend FormalSeries mul(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries add(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries sub(const FormalSeries& a, const FormalSeries& b);
  static FormalSeries combine(const FormalSeries& a, const FormalSeries& b, double sign);
  void prune();

  int nvars_;
  Truncation truncation_;
  TermMap terms_;
};

FormalSeries add(const FormalSeries& a, const FormalSeries& b);
FormalSeries sub(const FormalSeries& a, const FormalSeries& b);
FormalSeries mul(const FormalSeries& a, const FormalSeries& b);

/// Poisson bracket in canonical variables (x_1..x_n, xi_1..xi_n):
/// {a, b} = sum_j d_xi_j a * d_x_j b - d_x_j a * d_xi_j b, i.e. H_a b.
FormalSeries poisson(const FormalSeries& a, const FormalSeries& b);

/// Substitutes subs[i] for variable i of f. All substitutes must share nvars;
/// the result carries the meet of their truncations.
FormalSeries compose(const FormalSeries& f, std::span<const FormalSeries> subs);

/// exp(ad_p) f = sum_k H_p^k f / k!, summed until the terms vanish under
/// truncation or drop below roundoff.
FormalSeries lie_exp(const FormalSeries& p, const FormalSeries& f);

/// f(c + d) = sum_k taylor[k] d^k where c is the constant term of s.
FormalSeries apply_taylor(const FormalSeries& s, std::span<const Complex> taylor);

FormalSeries sin(const FormalSeries& s);
FormalSeries cos(const FormalSeries& s);
FormalSeries sqrt(const FormalSeries& s);
FormalSeries reciprocal(const FormalSeries& s);

double max_abs_difference(const FormalSeries& a, const FormalSeries& b);

inline FormalSeries operator+(const FormalSeries& a, const FormalSeries& b) { return add(a, b); }
inline FormalSeries operator-(const FormalSeries& a, const FormalSeries& b) { return sub(a, b); }
inline FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) { return mul(a, b); }
inline FormalSeries operator/(const FormalSeries& a, const FormalSeries& b) { return mul(a, reciprocal(b)); }
inline FormalSeries operator*(Complex c, const FormalSeries& a) { return a.scaled(c); }
inline FormalSeries operator*(const FormalSeries& a, Complex c) { return a.scaled(c); }
inline FormalSeries operator*(double c, const FormalSeries& a) { return a.scaled(c); }
inline FormalSeries operator*(const FormalSeries& a, double c) { return a.scaled(c); }
inline FormalSeries operator/(const FormalSeries& a, double c) { return a.scaled(1.0 / c); }
FormalSeries operator+(const FormalSeries& a, Complex c);
FormalSeries operator-(const FormalSeries& a, Complex c);
inline FormalSeries operator+(const FormalSeries& a, double c) { return a + Complex(c); }
inline FormalSeries operator-(const FormalSeries& a, double c) { return a - Complex(c); }
inline FormalSeries operator+(double c, const FormalSeries& a) { return a + Complex(c); }
inline FormalSeries operator-(double c, const FormalSeries& a) { return (-a) + Complex(c); }

/// {"nvars": n, "terms": [{"exp": [...], "hpow": j, "re": .., "im": ..}]}
nlohmann::json to_json(const FormalSeries& s);
FormalSeries from_json(const nlohmann::json& j, Truncation truncation = Truncation::degree(Monomial::kMaxExponent,
                                                                                           Monomial::kMaxExponent));

}  // namespace resforge::series
