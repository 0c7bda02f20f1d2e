#include "resforge/series/map_germ.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resforge/errors.hpp"

namespace resforge::series {

namespace {

constexpr double kQuadraticTol = 1e-12;

std::vector<int> unit_pair(int nvars, int i, int j) {
  std::vector<int> e(nvars, 0);
  e[i] += 1;
  e[j] += 1;
  return e;
}

}  // namespace

HamiltonianGerm::HamiltonianGerm(FormalSeries p) : p_(std::move(p)) {
  if (p_.nvars() % 2 != 0 || p_.nvars() == 0) {
    throw ValidationError("hamiltonian", "needs an even, positive number of variables");
  }
  const int nv = p_.nvars();
  const int n = nv / 2;
  for (int j = 0; j < n; ++j) {
    Complex c = p_.coeff(unit_pair(nv, j, n + j));
    if (std::abs(c.imag()) > kQuadraticTol * std::max(1.0, std::abs(c)) || c.real() <= 0.0) {
      throw ValidationError("hamiltonian", "coefficient of x" + std::to_string(j + 1) + "*xi" + std::to_string(j + 1) +
                                               " must be real and positive");
    }
    mu_.push_back(c.real());
  }
  const double scale = *std::max_element(mu_.begin(), mu_.end());
  for (const auto& [m, c] : p_.terms()) {
    if (m.hpow() != 0) continue;
    const int deg = m.degree();
    if (deg == 0 || deg == 1) {
      if (std::abs(c) > kQuadraticTol * scale) throw ValidationError("hamiltonian", "p(0) and dp(0) must vanish");
    } else if (deg == 2) {
      bool diagonal = false;
      for (int j = 0; j < n; ++j) diagonal |= (m.exponent(j) == 1 && m.exponent(n + j) == 1);
      if (!diagonal && std::abs(c) > kQuadraticTol * scale) {
        throw ValidationError("hamiltonian", "quadratic part must be sum_j mu_j x_j xi_j");
      }
    }
  }
}

SymplecticMapGerm::SymplecticMapGerm(int n, int order, std::vector<FormalSeries> components)
    : n_(n), order_(order), components_(std::move(components)) {
  if (n < 1 || order < 1) throw DimensionError("map germ needs n >= 1 and order >= 1");
  if (static_cast<int>(components_.size()) != 2 * n) throw DimensionError("map germ needs 2n components");
  for (auto& c : components_) {
    if (c.nvars() != 2 * n) throw DimensionError("map germ component has wrong variable count");
    c = c.with_truncation(Truncation::degree(order));
  }
}

SymplecticMapGerm SymplecticMapGerm::identity(int n, int order) {
  std::vector<FormalSeries> comps;
  for (int i = 0; i < 2 * n; ++i) comps.push_back(FormalSeries::variable(2 * n, Truncation::degree(order), i));
  return SymplecticMapGerm(n, order, std::move(comps));
}

SymplecticMapGerm SymplecticMapGerm::linear(const Eigen::MatrixXd& m, int order) {
  const int nv = static_cast<int>(m.rows());
  if (m.cols() != nv || nv % 2 != 0) throw DimensionError("linear germ needs a square matrix of even size");
  std::vector<FormalSeries> comps;
  for (int i = 0; i < nv; ++i) {
    FormalSeries c(nv, Truncation::degree(order));
    for (int j = 0; j < nv; ++j) {
      if (m(i, j) != 0.0) c += FormalSeries::variable(nv, Truncation::degree(order), j, m(i, j));
    }
    comps.push_back(c);
  }
  return SymplecticMapGerm(nv / 2, order, std::move(comps));
}

std::vector<Complex> SymplecticMapGerm::evaluate(const std::vector<Complex>& point) const {
  std::vector<Complex> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.evaluate(point));
  return out;
}

std::vector<double> SymplecticMapGerm::evaluate_real(const std::vector<double>& point) const {
  std::vector<Complex> z(point.begin(), point.end());
  std::vector<double> out;
  for (const auto& v : evaluate(z)) out.push_back(v.real());
  return out;
}

Eigen::MatrixXd SymplecticMapGerm::linear_part() const {
  const int nv = 2 * n_;
  Eigen::MatrixXd m(nv, nv);
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) m(i, j) = components_[i].coeff(Monomial().with_exponent(j, 1)).real();
  }
  return m;
}

SymplecticMapGerm SymplecticMapGerm::truncated(int order) const {
  return SymplecticMapGerm(n_, std::min(order, order_), components_);
}

double SymplecticMapGerm::symplectic_defect() const {
  const int nv = 2 * n_;
  const Truncation t = Truncation::degree(order_ - 1);
  std::vector<std::vector<FormalSeries>> jac(nv);
  for (int i = 0; i < nv; ++i) {
    for (int a = 0; a < nv; ++a) jac[i].push_back(components_[i].derivative(a).with_truncation(t));
  }
  double defect = 0.0;
  for (int a = 0; a < nv; ++a) {
    for (int b = a + 1; b < nv; ++b) {
      FormalSeries s(nv, t);
      for (int j = 0; j < n_; ++j) {
        s += jac[j][a] * jac[n_ + j][b];
        s -= jac[n_ + j][a] * jac[j][b];
      }
      // Omega(e_a, e_b) with Omega = [[0, I], [-I, 0]].
      double target = (b == a + n_ && a < n_) ? 1.0 : 0.0;
      defect = std::max(defect, max_abs_difference(s, FormalSeries::constant(nv, t, target)));
    }
  }
  return defect;
}

SymplecticMapGerm compose(const SymplecticMapGerm& outer, const SymplecticMapGerm& inner) {
  if (outer.n() != inner.n()) throw DimensionError("compose: germs of different dimension");
  const int order = std::min(outer.order(), inner.order());
  std::vector<FormalSeries> subs;
  for (const auto& c : inner.components()) subs.push_back(c.with_truncation(Truncation::degree(order)));
  std::vector<FormalSeries> comps;
  for (const auto& c : outer.components()) comps.push_back(compose(c, subs));
  return SymplecticMapGerm(outer.n(), order, std::move(comps));
}

double max_abs_difference(const SymplecticMapGerm& a, const SymplecticMapGerm& b) {
  if (a.n() != b.n()) throw DimensionError("germs of different dimension");
  const int order = std::min(a.order(), b.order());
  double m = 0.0;
  for (int i = 0; i < 2 * a.n(); ++i) {
    m = std::max(m, max_abs_difference(a.component(i).with_truncation(Truncation::degree(order)),
                                       b.component(i).with_truncation(Truncation::degree(order))));
  }
  return m;
}

SymplecticMapGerm flow_of(const FormalSeries& generator, int n, int order) {
  if (generator.nvars() != 2 * n) throw DimensionError("generator has wrong variable count");
  const Truncation t = Truncation::degree(order);
  const FormalSeries g = generator.with_truncation(Truncation::degree(order + 1));
  std::vector<FormalSeries> comps;
  for (int i = 0; i < 2 * n; ++i) {
    // Lie series in the degree-(order+1) grading, so a quadratic or cubic
    // generator acts on coordinates without losing the top degree.
    comps.push_back(lie_exp(g, FormalSeries::variable(2 * n, Truncation::degree(order + 1), i)).with_truncation(t));
  }
  return SymplecticMapGerm(n, order, std::move(comps));
}

SymplecticMapGerm hamiltonian_flow_map(const HamiltonianGerm& p, int order) {
  return flow_of(p.series(), p.n(), order);
}

}  // namespace resforge::series
