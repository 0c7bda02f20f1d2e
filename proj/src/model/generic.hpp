#pragma once

// Precision-generic pieces of the solver. Included by the double and the
// multiprecision translation units, each instantiating its own scalar type.

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "resforge/errors.hpp"
#include "resforge/model/normal_form.hpp"
#include "resforge/series/univariate.hpp"

namespace resforge::model::generic {

template <class C>
struct Scalar;

template <>
struct Scalar<std::complex<double>> {
  using Real = double;
  static double to_double(const Real& x) { return x; }
};

template <class C>
using RealOf = typename Scalar<C>::Real;

template <class C>
C make(Complex c) {
  return C(RealOf<C>(c.real()), RealOf<C>(c.imag()));
}

template <class C>
double abs_d(const C& z) {
  using std::abs;
  return Scalar<C>::to_double(abs(z));
}

template <class C>
Complex to_complex(const C& z) {
  using std::imag;
  using std::real;
  return {Scalar<C>::to_double(real(z)), Scalar<C>::to_double(imag(z))};
}

template <class C>
std::vector<C> action_values(const MultiIndex& alpha) {
  std::vector<C> y;
  for (int a : alpha) y.emplace_back(RealOf<C>(0), -RealOf<C>(2 * a + 1) / 2);
  return y;
}

template <class C>
C eval_poly(const FormalSeries& p, const std::vector<C>& z) {
  C total(0);
  for (const auto& [m, c] : p.terms()) {
    C v = make<C>(c);
    for (std::size_t i = 0; i < z.size(); ++i) {
      for (int e = 0; e < m.exponent(static_cast<int>(i)); ++e) v *= z[i];
    }
    total += v;
  }
  return total;
}

/// Coefficients a_0..a_{r+1} of lambda/k in powers of t = 1/k.
///
/// With w = lambda/k the model equation divided by k reads
///   2 d w + c0 t + sum_{m>=2} q_m t^m w^{1-m} = 2 pi,
/// so a_0 = pi/d, a_1 = -c0/(2d) and, for m >= 2,
///   a_m = -(1/2d) sum_{j=2}^{m} q_j [t^{m-j}] w^{1-j}.
template <class C>
std::vector<C> string_coefficients(const DecomposedForm& df, const MultiIndex& alpha, double d, int r) {
  using R = RealOf<C>;
  const R pi = boost::math::constants::pi<R>();
  const R dd(d);
  const auto y = action_values<C>(alpha);
  C c0 = make<C>(df.F1_0);
  for (int i = 0; i < df.n; ++i) c0 += R(df.mu[i]) * y[i];

  std::vector<C> q(r + 2, C(0));
  for (int m = 2; m <= std::min(r + 1, df.r); ++m) q[m] = make<C>(df.Fj0[m]) + eval_poly<C>(df.f(m), y);

  std::vector<C> a(r + 2, C(0));
  a[0] = C(pi / dd);
  if (r + 1 >= 1) a[1] = -c0 / (R(2) * dd);
  for (int m = 2; m <= r + 1; ++m) {
    series::Univariate<C> w(m);
    for (int j = 0; j < m; ++j) w[j] = a[j];
    C sum(0);
    for (int j = 2; j <= m; ++j) {
      if (q[j] == C(0)) continue;
      sum += q[j] * w.pow(1 - j).coeff(m - j);
    }
    a[m] = -sum / (R(2) * dd);
  }
  return a;
}

template <class C>
C string_value(const std::vector<C>& a, long long k) {
  using R = RealOf<C>;
  const R kk(static_cast<double>(k));
  C total(0);
  R kpow(1);
  for (std::size_t j = 0; j < a.size(); ++j) {
    total += a[j] * (kk * kpow);
    kpow /= kk;
  }
  return total;
}

/// Precomputed derivatives of F_j for the model equation and its derivative.
struct Prepared {
  const NormalFormData* nf;
  std::vector<std::vector<FormalSeries>> dF;  // dF[j][i] = d F_j / d iota_i
};

inline Prepared prepare(const NormalFormData& nf) {
  Prepared p{&nf, {}};
  for (const auto& Fj : nf.F) {
    std::vector<FormalSeries> row;
    for (int i = 0; i < nf.n; ++i) row.push_back(Fj.derivative(i));
    p.dF.push_back(std::move(row));
  }
  return p;
}

/// F^r(iota; h) at iota = y/lambda, h = 1/lambda.
template <class C>
C eval_F(const NormalFormData& nf, const std::vector<C>& y, const C& lambda) {
  const C h = C(1) / lambda;
  std::vector<C> iota;
  for (const auto& v : y) iota.push_back(v * h);
  C total(0);
  C hpow(1);
  for (const auto& Fj : nf.F) {
    total += hpow * eval_poly<C>(Fj, iota);
    hpow *= h;
  }
  return total;
}

template <class C>
C model_equation(const NormalFormData& nf, const std::vector<C>& y, long long k, const C& lambda) {
  using R = RealOf<C>;
  const R pi = boost::math::constants::pi<R>();
  return R(2) * R(nf.d) * lambda + lambda * eval_F<C>(nf, y, lambda) - R(2) * pi * R(static_cast<double>(k));
}

/// g'(lambda) = 2d + F - (1/lambda)(d_iota F . y + d_h F).
template <class C>
C model_derivative(const Prepared& p, const std::vector<C>& y, const C& lambda) {
  using R = RealOf<C>;
  const NormalFormData& nf = *p.nf;
  const C h = C(1) / lambda;
  std::vector<C> iota;
  for (const auto& v : y) iota.push_back(v * h);
  C F(0), dF_iota_y(0), dF_h(0);
  C hpow(1), hpow_prev(0);
  for (int j = 0; j < static_cast<int>(nf.F.size()); ++j) {
    F += hpow * eval_poly<C>(nf.F[j], iota);
    for (int i = 0; i < nf.n; ++i) dF_iota_y += hpow * eval_poly<C>(p.dF[j][i], iota) * y[i];
    if (j >= 1) dF_h += R(j) * hpow_prev * eval_poly<C>(nf.F[j], iota);
    hpow_prev = hpow;
    hpow *= h;
  }
  return R(2) * R(nf.d) + F - h * (dF_iota_y + dF_h);
}

template <class C>
struct NewtonOutcome {
  C lambda;
  int iterations;
  double residual;
};

template <class C>
NewtonOutcome<C> newton(const NormalFormData& nf, const MultiIndex& alpha, long long k, C lambda, double tol,
                        int max_iterations) {
  const Prepared p = prepare(nf);
  const auto y = action_values<C>(alpha);
  const double target = tol * static_cast<double>(k);
  std::vector<double> trace;
  for (int it = 0; it <= max_iterations; ++it) {
    const C g = model_equation<C>(nf, y, k, lambda);
    const double ag = abs_d(g);
    trace.push_back(ag);
    if (ag < target) return {lambda, it, ag};
    if (it == max_iterations) break;
    const C gp = model_derivative<C>(p, y, lambda);
    if (abs_d(gp) < nf.d) {
      throw OracleError("Newton derivative |g'| = " + std::to_string(abs_d(gp)) + " below d at k = " +
                        std::to_string(k));
    }
    lambda -= g / gp;
  }
  std::ostringstream msg;
  msg << "Newton did not converge in " << max_iterations << " iterations at k = " << k << "; |g| trace:";
  for (double v : trace) msg << ' ' << v;
  throw OracleError(msg.str());
}

}  // namespace resforge::model::generic
