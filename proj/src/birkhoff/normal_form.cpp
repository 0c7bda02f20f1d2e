#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "resforge/birkhoff/birkhoff.hpp"
#include "resforge/errors.hpp"

namespace resforge::birkhoff {

using series::Monomial;
using series::Truncation;

namespace {

std::string describe(const Monomial& m, int n) {
  std::ostringstream os;
  bool any = false;
  for (int j = 0; j < n; ++j) {
    if (m.exponent(j)) {
      os << (any ? "*" : "") << "x" << j + 1 << "^" << m.exponent(j);
      any = true;
    }
  }
  for (int j = 0; j < n; ++j) {
    if (m.exponent(n + j)) {
      os << (any ? "*" : "") << "xi" << j + 1 << "^" << m.exponent(n + j);
      any = true;
    }
  }
  return any ? os.str() : "1";
}

double exponent_weight(const Monomial& m, const std::vector<double>& mu) {
  const int n = static_cast<int>(mu.size());
  double e = 0.0;
  for (int j = 0; j < n; ++j) e += mu[j] * (m.exponent(j) - m.exponent(n + j));
  return e;
}

// (e^t - 1)/t, continuous at 0.
double phi(double t) { return t == 0.0 ? 1.0 : std::expm1(t) / t; }

}  // namespace

HamiltonianGerm interpolating_hamiltonian(const SymplecticMapGerm& germ, double tol) {
  const int n = germ.n();
  const int nv = 2 * n;
  const int order = germ.order();
  const Eigen::MatrixXd L = germ.linear_part();
  const double scale = L.cwiseAbs().maxCoeff();
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (i != j && std::abs(L(i, j)) > 1e-10 * scale) {
        throw HyperbolicityError("linear part is not diagonal in the given coordinates");
      }
    }
  }
  std::vector<double> mu(n);
  for (int j = 0; j < n; ++j) {
    const double nu = L(j, j);
    if (!(nu > 1.0) || std::abs(L(n + j, n + j) * nu - 1.0) > 1e-8) {
      throw HyperbolicityError("linear part must be diag(nu, 1/nu) with nu > 1");
    }
    mu[j] = std::log(nu);
  }

  const Truncation t = Truncation::degree(order + 1);
  FormalSeries p(nv, t);
  for (int j = 0; j < n; ++j) {
    p.add_term(Monomial().with_exponent(j, 1).with_exponent(n + j, 1), mu[j]);
  }

  for (int m = 3; m <= order + 1; ++m) {
    const auto flow = series::flow_of(p, n, m - 1);
    std::map<Monomial, Complex> num;
    for (int i = 0; i < nv; ++i) {
      const auto resid = (germ.component(i).with_truncation(Truncation::degree(m - 1)) - flow.component(i))
                             .homogeneous_part(m - 1);
      const int j = i % n;
      const bool is_x = i < n;
      for (const auto& [N, r] : resid.terms()) {
        const Monomial M = is_x ? N.with_exponent(n + j, N.exponent(n + j) + 1) : N.with_exponent(j, N.exponent(j) + 1);
        const double f = phi(exponent_weight(M, mu));
        const double coef = is_x ? M.exponent(n + j) * std::exp(mu[j]) * f : -M.exponent(j) * std::exp(-mu[j]) * f;
        num[M] += coef * r;
      }
    }
    // Each unknown enters one equation per coordinate it moves; solve each
    // small overdetermined system in the least-squares sense.
    for (const auto& [M, s] : num) {
      const double f = phi(exponent_weight(M, mu));
      double den = 0.0;
      for (int j = 0; j < n; ++j) {
        den += std::pow(M.exponent(n + j) * std::exp(mu[j]) * f, 2);
        den += std::pow(M.exponent(j) * std::exp(-mu[j]) * f, 2);
      }
      if (den == 0.0) throw SolverError("homological operator not invertible at monomial " + describe(M, n));
      p.add_term(M, s / den);
    }
  }

  const auto check = series::flow_of(p, n, order);
  double worst = 0.0, germ_scale = 1.0;
  std::string where;
  for (int i = 0; i < nv; ++i) {
    germ_scale = std::max(germ_scale, germ.component(i).max_abs());
    const auto diff = germ.component(i) - check.component(i);
    for (const auto& [M, c] : diff.terms()) {
      if (std::abs(c) > worst) {
        worst = std::abs(c);
        where = "component " + std::to_string(i) + ", monomial " + describe(M, n);
      }
    }
  }
  if (worst > tol * germ_scale) {
    throw SolverError("re-expanded flow misses the germ by " + std::to_string(worst) + " at " + where +
                      " (germ not symplectic to this order?)");
  }
  return HamiltonianGerm(p);
}

FormalSeries actions_to_iota(const FormalSeries& resonant, int n) {
  const int cap = resonant.truncation().max_degree(0) / 2;
  FormalSeries out(n, Truncation::degree(std::max(cap, 1)));
  for (const auto& [M, c] : resonant.terms()) {
    std::vector<int> e(n);
    bool res = true;
    for (int j = 0; j < n; ++j) {
      res &= M.exponent(j) == M.exponent(n + j);
      e[j] = M.exponent(j);
    }
    if (res) out += FormalSeries::monomial(n, out.truncation(), e, c);
  }
  return out;
}

FormalSeries iota_to_actions(const FormalSeries& poly, int n, Truncation t) {
  FormalSeries out(2 * n, t);
  for (const auto& [M, c] : poly.terms()) {
    Monomial m;
    for (int j = 0; j < n; ++j) m = m.with_exponent(j, M.exponent(j)).with_exponent(n + j, M.exponent(j));
    out.add_term(m, c);
  }
  return out;
}

BirkhoffResult classical_bnf(const HamiltonianGerm& p, int order) {
  if (order < 1) throw ValidationError("order", "must be >= 1");
  const int n = p.n();
  const auto& mu = p.mu();
  const Truncation t = Truncation::degree(2 * order);
  FormalSeries cur = p.series().with_truncation(t);
  std::vector<FormalSeries> gens;
  for (int m = 3; m <= 2 * order; ++m) {
    FormalSeries W(2 * n, t);
    const FormalSeries part = cur.homogeneous_part(m);
    for (const auto& [M, c] : part.terms()) {
      bool resonant = true;
      for (int j = 0; j < n; ++j) resonant &= M.exponent(j) == M.exponent(n + j);
      if (resonant) continue;
      const double e = exponent_weight(M, mu);
      if (std::abs(e) < kSmallDivisor) {
        throw NearResonanceError("small divisor " + std::to_string(e) + " at monomial " + describe(M, n) +
                                 "; run the Diophantine check on mu");
      }
      W.add_term(M, c / e);
    }
    if (!W.is_zero()) cur = series::lie_exp(W, cur);
    gens.push_back(W);
  }

  const int germ_order = std::max(1, 2 * order - 1);
  auto C = SymplecticMapGerm::identity(n, germ_order);
  auto B = SymplecticMapGerm::identity(n, germ_order);
  for (const auto& W : gens) {
    if (W.is_zero()) continue;
    C = compose(C, series::flow_of(W, n, germ_order));
    B = compose(series::flow_of(-W, n, germ_order), B);
  }

  NormalFormF0 F0{n, mu, actions_to_iota(cur, n).degree_range(2, order)};
  return {F0, B, C, gens, cur};
}

}  // namespace resforge::birkhoff
