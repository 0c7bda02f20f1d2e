#include "resforge/series/formal_series.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "resforge/errors.hpp"

namespace resforge::series {

// --- Monomial -------------------------------------------------------------

Monomial::Monomial(std::span<const int> exponents, int hpow) {
  if (exponents.size() > static_cast<std::size_t>(kMaxVars)) {
    throw DimensionError("monomial has more than " + std::to_string(kMaxVars) + " variables");
  }
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0 || exponents[i] > kMaxExponent) {
      throw DimensionError("monomial exponent out of range: " + std::to_string(exponents[i]));
    }
    key_ |= static_cast<std::uint64_t>(exponents[i]) << (kBits * i);
  }
  if (hpow < 0 || hpow > kMaxExponent) throw DimensionError("h-power out of range");
  key_ |= static_cast<std::uint64_t>(hpow) << kHShift;
}

int Monomial::degree() const {
  int d = 0;
  for (int i = 0; i < kMaxVars; ++i) d += exponent(i);
  return d;
}

std::vector<int> Monomial::exponents(int nvars) const {
  std::vector<int> out(nvars);
  for (int i = 0; i < nvars; ++i) out[i] = exponent(i);
  return out;
}

Monomial Monomial::with_exponent(int var, int e) const {
  std::uint64_t k = key_ & ~(kMask << (kBits * var));
  return from_key(k | (static_cast<std::uint64_t>(e) << (kBits * var)));
}

Monomial Monomial::with_hpow(int hpow) const {
  std::uint64_t k = key_ & ~(std::uint64_t{0xff} << kHShift);
  return from_key(k | (static_cast<std::uint64_t>(hpow) << kHShift));
}

// --- Truncation -----------------------------------------------------------

namespace {
void check_cap(int cap) {
  if (cap < 0 || cap > Monomial::kMaxExponent) {
    throw DimensionError("truncation cap must lie in [0, " + std::to_string(Monomial::kMaxExponent) + "]");
  }
}
}  // namespace

Truncation Truncation::degree(int cap, int h_cap) {
  check_cap(cap);
  check_cap(h_cap);
  return Truncation(1, 0, cap, h_cap);
}

Truncation Truncation::two_graded(int order) {
  check_cap(2 * order);
  return Truncation(1, 2, 2 * order, order);
}

Truncation Truncation::weighted(int cap) {
  check_cap(cap);
  return Truncation(1, 1, cap, cap);
}

int Truncation::max_degree(int hpow) const {
  if (hpow < 0 || hpow > h_cap_) return -1;
  int rest = cap_ - h_weight_ * hpow;
  return rest < 0 ? -1 : rest / degree_weight_;
}

Truncation Truncation::meet(const Truncation& other) const {
  if (degree_weight_ != other.degree_weight_ || h_weight_ != other.h_weight_) {
    throw DimensionError("series use incompatible gradings");
  }
  return Truncation(degree_weight_, h_weight_, std::min(cap_, other.cap_), std::min(h_cap_, other.h_cap_));
}

// --- FormalSeries ---------------------------------------------------------

FormalSeries::FormalSeries(int nvars, Truncation truncation) : nvars_(nvars), truncation_(truncation) {
  if (nvars < 0 || nvars > Monomial::kMaxVars) {
    throw DimensionError("series supports at most " + std::to_string(Monomial::kMaxVars) + " variables");
  }
}

FormalSeries FormalSeries::constant(int nvars, Truncation truncation, Complex value) {
  FormalSeries s(nvars, truncation);
  s.add_term(Monomial(), value);
  return s;
}

FormalSeries FormalSeries::variable(int nvars, Truncation truncation, int index, Complex scale) {
  if (index < 0 || index >= nvars) throw DimensionError("variable index out of range");
  FormalSeries s(nvars, truncation);
  s.add_term(Monomial().with_exponent(index, 1), scale);
  return s;
}

FormalSeries FormalSeries::monomial(int nvars, Truncation truncation, std::span<const int> exponents, Complex coeff,
                                    int hpow) {
  if (static_cast<int>(exponents.size()) != nvars) throw DimensionError("exponent vector length != nvars");
  FormalSeries s(nvars, truncation);
  s.add_term(Monomial(exponents, hpow), coeff);
  return s;
}

Complex FormalSeries::coeff(std::span<const int> exponents, int hpow) const {
  if (static_cast<int>(exponents.size()) != nvars_) throw DimensionError("exponent vector length != nvars");
  return coeff(Monomial(exponents, hpow));
}

Complex FormalSeries::coeff(Monomial m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Complex{} : it->second;
}

Complex FormalSeries::constant_term() const { return coeff(Monomial()); }

int FormalSeries::max_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double FormalSeries::max_abs() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

FormalSeries FormalSeries::homogeneous_part(int degree) const { return degree_range(degree, degree); }

FormalSeries FormalSeries::degree_range(int lo, int hi) const {
  FormalSeries out(nvars_, truncation_);
  for (const auto& [m, c] : terms_) {
    int d = m.degree();
    if (d >= lo && d <= hi) out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  return out;
}

FormalSeries FormalSeries::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw DimensionError("derivative variable out of range");
  FormalSeries out(nvars_, truncation_);
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(var);
    if (e == 0) continue;
    out.terms_[m.with_exponent(var, e - 1)] += c * static_cast<double>(e);
  }
  out.prune();
  return out;
}

FormalSeries FormalSeries::scaled(Complex factor) const {
  FormalSeries out(nvars_, truncation_);
  if (factor == Complex{}) return out;
  for (const auto& [m, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, c * factor);
  out.prune();
  return out;
}

FormalSeries FormalSeries::with_truncation(Truncation truncation) const {
  FormalSeries out(nvars_, truncation);
  for (const auto& [m, c] : terms_) {
    if (truncation.keeps(m.degree(), m.hpow())) out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  return out;
}

Complex FormalSeries::evaluate(std::span<const Complex> point, Complex h) const {
  if (static_cast<int>(point.size()) != nvars_) throw DimensionError("evaluation point has wrong dimension");
  Complex total{};
  for (const auto& [m, c] : terms_) {
    Complex v = c;
    for (int i = 0; i < nvars_; ++i) {
      int e = m.exponent(i);
      for (int k = 0; k < e; ++k) v *= point[i];
    }
    for (int k = 0; k < m.hpow(); ++k) v *= h;
    total += v;
  }
  return total;
}

void FormalSeries::add_term(Monomial m, Complex coeff) {
  for (int i = nvars_; i < Monomial::kMaxVars; ++i) {
    if (m.exponent(i) != 0) throw DimensionError("monomial uses a variable beyond nvars");
  }
  if (!truncation_.keeps(m.degree(), m.hpow())) return;
  terms_[m] += coeff;
  prune();
}

FormalSeries& FormalSeries::operator+=(const FormalSeries& other) {
  *this = add(*this, other);
  return *this;
}

FormalSeries& FormalSeries::operator-=(const FormalSeries& other) {
  *this = sub(*this, other);
  return *this;
}

void FormalSeries::prune() {
  std::map<std::pair<int, int>, double> grade_max;
  for (const auto& [m, c] : terms_) {
    double& g = grade_max[{m.degree(), m.hpow()}];
    g = std::max(g, std::abs(c));
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    double floor = kPruneFloor * grade_max[{it->first.degree(), it->first.hpow()}];
    double mag = std::abs(it->second);
    if (mag == 0.0 || mag < floor) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

// --- free operations ------------------------------------------------------

namespace {

void require_same_vars(const FormalSeries& a, const FormalSeries& b) {
  if (a.nvars() != b.nvars()) {
    throw DimensionError("series have different variable counts (" + std::to_string(a.nvars()) + " vs " +
                         std::to_string(b.nvars()) + ")");
  }
}

}  // namespace

FormalSeries FormalSeries::combine(const FormalSeries& a, const FormalSeries& b, double sign) {
  require_same_vars(a, b);
  Truncation t = a.truncation().meet(b.truncation());
  std::vector<std::pair<Monomial, Complex>> merged;
  merged.reserve(a.size() + b.size());
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() || ib != b.terms().end()) {
    if (ib == b.terms().end() || (ia != a.terms().end() && ia->first < ib->first)) {
      merged.emplace_back(ia->first, ia->second);
      ++ia;
    } else if (ia == a.terms().end() || ib->first < ia->first) {
      merged.emplace_back(ib->first, sign * ib->second);
      ++ib;
    } else {
      merged.emplace_back(ia->first, ia->second + sign * ib->second);
      ++ia;
      ++ib;
    }
  }
  FormalSeries out(a.nvars(), t);
  for (const auto& [m, c] : merged) {
    if (t.keeps(m.degree(), m.hpow())) out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  out.prune();
  return out;
}

FormalSeries add(const FormalSeries& a, const FormalSeries& b) { return FormalSeries::combine(a, b, 1.0); }
FormalSeries sub(const FormalSeries& a, const FormalSeries& b) { return FormalSeries::combine(a, b, -1.0); }

FormalSeries mul(const FormalSeries& a, const FormalSeries& b) {
  require_same_vars(a, b);
  Truncation t = a.truncation().meet(b.truncation());
  struct Entry {
    std::uint64_t key;
    Complex c;
    int deg;
    int hp;
  };
  auto unpack = [](const FormalSeries& s) {
    std::vector<Entry> v;
    v.reserve(s.size());
    for (const auto& [m, c] : s.terms()) v.push_back({m.key(), c, m.degree(), m.hpow()});
    return v;
  };
  const auto ea = unpack(a);
  const auto eb = unpack(b);
  std::vector<std::pair<std::uint64_t, Complex>> products;
  products.reserve(ea.size() * eb.size());
  for (const auto& x : ea) {
    for (const auto& y : eb) {
      if (!t.keeps(x.deg + y.deg, x.hp + y.hp)) continue;
      products.emplace_back(x.key + y.key, x.c * y.c);
    }
  }
  std::sort(products.begin(), products.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  FormalSeries out(a.nvars(), t);
  for (std::size_t i = 0; i < products.size();) {
    std::size_t j = i;
    Complex sum{};
    while (j < products.size() && products[j].first == products[i].first) sum += products[j++].second;
    out.terms_.emplace_hint(out.terms_.end(), Monomial::from_key(products[i].first), sum);
    i = j;
  }
  out.prune();
  return out;
}

FormalSeries poisson(const FormalSeries& a, const FormalSeries& b) {
  require_same_vars(a, b);
  if (a.nvars() % 2 != 0) throw DimensionError("Poisson bracket needs an even number of canonical variables");
  const int n = a.nvars() / 2;
  Truncation t = a.truncation().meet(b.truncation());
  FormalSeries out(a.nvars(), t);
  for (int j = 0; j < n; ++j) {
    out += mul(a.derivative(n + j), b.derivative(j));
    out -= mul(a.derivative(j), b.derivative(n + j));
  }
  return out;
}

FormalSeries compose(const FormalSeries& f, std::span<const FormalSeries> subs) {
  if (static_cast<int>(subs.size()) != f.nvars()) {
    throw DimensionError("compose: need one substitute per variable of the outer series");
  }
  if (subs.empty()) throw DimensionError("compose: no substitutes given");
  const int m = subs[0].nvars();
  Truncation t = subs[0].truncation();
  for (const auto& s : subs) {
    if (s.nvars() != m) throw DimensionError("compose: substitutes disagree on nvars");
    t = t.meet(s.truncation());
  }
  // Lazily built powers subs[i]^e.
  std::vector<std::vector<FormalSeries>> powers(subs.size());
  auto power = [&](std::size_t i, int e) -> const FormalSeries& {
    auto& list = powers[i];
    if (list.empty()) list.push_back(FormalSeries::constant(m, t, 1.0));
    while (static_cast<int>(list.size()) <= e) list.push_back(mul(list.back(), subs[i].with_truncation(t)));
    return list[e];
  };
  FormalSeries out(m, t);
  for (const auto& [mono, c] : f.terms()) {
    FormalSeries term = FormalSeries::constant(m, t, c);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      int e = mono.exponent(static_cast<int>(i));
      if (e > 0) term = mul(term, power(i, e));
      if (term.is_zero()) break;
    }
    if (mono.hpow() > 0 && !term.is_zero()) {
      FormalSeries shift(m, t);
      shift.add_term(Monomial().with_hpow(mono.hpow()), 1.0);
      term = mul(term, shift);
    }
    out += term;
  }
  return out;
}

FormalSeries lie_exp(const FormalSeries& p, const FormalSeries& f) {
  constexpr int kMaxTerms = 400;
  constexpr double kTermFloor = 1e-18;
  FormalSeries result = f.with_truncation(f.truncation().meet(p.truncation()));
  FormalSeries term = result;
  int small_streak = 0;
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = poisson(p, term).scaled(1.0 / k);
    if (term.is_zero()) break;
    result += term;
    if (term.max_abs() < kTermFloor * std::max(1.0, result.max_abs())) {
      if (++small_streak >= 2) break;
    } else {
      small_streak = 0;
    }
  }
  return result;
}

FormalSeries apply_taylor(const FormalSeries& s, std::span<const Complex> taylor) {
  FormalSeries out(s.nvars(), s.truncation());
  if (taylor.empty()) return out;
  FormalSeries delta = s - s.constant_term();
  out += FormalSeries::constant(s.nvars(), s.truncation(), taylor[0]);
  FormalSeries power = FormalSeries::constant(s.nvars(), s.truncation(), 1.0);
  for (std::size_t k = 1; k < taylor.size(); ++k) {
    power = mul(power, delta);
    if (power.is_zero()) break;
    out += power.scaled(taylor[k]);
  }
  return out;
}

namespace {

std::size_t taylor_length(const FormalSeries& s) {
  const auto& t = s.truncation();
  return static_cast<std::size_t>(t.cap() + t.h_cap() + 2);
}

}  // namespace

FormalSeries sin(const FormalSeries& s) {
  const Complex c = s.constant_term();
  const Complex sc = std::sin(c), cc = std::cos(c);
  std::vector<Complex> taylor(taylor_length(s));
  double fact = 1.0;
  for (std::size_t k = 0; k < taylor.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    const Complex d = (k % 4 == 0) ? sc : (k % 4 == 1) ? cc : (k % 4 == 2) ? -sc : -cc;
    taylor[k] = d / fact;
  }
  return apply_taylor(s, taylor);
}

FormalSeries cos(const FormalSeries& s) {
  const Complex c = s.constant_term();
  const Complex sc = std::sin(c), cc = std::cos(c);
  std::vector<Complex> taylor(taylor_length(s));
  double fact = 1.0;
  for (std::size_t k = 0; k < taylor.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    const Complex d = (k % 4 == 0) ? cc : (k % 4 == 1) ? -sc : (k % 4 == 2) ? -cc : sc;
    taylor[k] = d / fact;
  }
  return apply_taylor(s, taylor);
}

FormalSeries sqrt(const FormalSeries& s) {
  const Complex c = s.constant_term();
  if (c == Complex{}) throw DimensionError("sqrt of a series with zero constant term");
  std::vector<Complex> taylor(taylor_length(s));
  Complex binom = 1.0;  // binom(1/2, k)
  Complex cpow = std::sqrt(c);
  for (std::size_t k = 0; k < taylor.size(); ++k) {
    taylor[k] = binom * cpow;
    binom *= (0.5 - static_cast<double>(k)) / static_cast<double>(k + 1);
    cpow /= c;
  }
  return apply_taylor(s, taylor);
}

FormalSeries reciprocal(const FormalSeries& s) {
  const Complex c = s.constant_term();
  if (c == Complex{}) throw DimensionError("reciprocal of a series with zero constant term");
  std::vector<Complex> taylor(taylor_length(s));
  Complex v = 1.0 / c;
  for (std::size_t k = 0; k < taylor.size(); ++k) {
    taylor[k] = v;
    v *= -1.0 / c;
  }
  return apply_taylor(s, taylor);
}

FormalSeries operator+(const FormalSeries& a, Complex c) {
  return add(a, FormalSeries::constant(a.nvars(), a.truncation(), c));
}

FormalSeries operator-(const FormalSeries& a, Complex c) {
  return sub(a, FormalSeries::constant(a.nvars(), a.truncation(), c));
}

double max_abs_difference(const FormalSeries& a, const FormalSeries& b) {
  require_same_vars(a, b);
  double m = 0.0;
  for (const auto& [mono, c] : a.terms()) m = std::max(m, std::abs(c - b.coeff(mono)));
  for (const auto& [mono, c] : b.terms()) {
    if (!a.terms().contains(mono)) m = std::max(m, std::abs(c));
  }
  return m;
}

// --- JSON -----------------------------------------------------------------

nlohmann::json to_json(const FormalSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : s.terms()) {
    terms.push_back({{"exp", m.exponents(s.nvars())}, {"hpow", m.hpow()}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"nvars", s.nvars()}, {"terms", terms}};
}

FormalSeries from_json(const nlohmann::json& j, Truncation truncation) {
  try {
    const int nvars = j.at("nvars").get<int>();
    FormalSeries s(nvars, truncation);
    for (const auto& t : j.at("terms")) {
      auto exps = t.at("exp").get<std::vector<int>>();
      if (static_cast<int>(exps.size()) != nvars) {
        throw ValidationError("terms.exp", "exponent vector length differs from nvars");
      }
      const int hpow = t.value("hpow", 0);
      const Complex c(t.at("re").get<double>(), t.value("im", 0.0));
      s.add_term(Monomial(exps, hpow), c);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("series", e.what());
  }
}

}  // namespace resforge::series
