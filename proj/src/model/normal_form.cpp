#include "resforge/model/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resforge/errors.hpp"

namespace resforge::model {

using series::Monomial;
using series::Truncation;

namespace {

constexpr double kExactTol = 1e-14;

std::string fj(int j) { return "F[" + std::to_string(j) + "]"; }

}  // namespace

NormalFormData NormalFormData::linear(double d, std::vector<double> mu, int r) {
  NormalFormData nf;
  nf.n = static_cast<int>(mu.size());
  nf.d = d;
  nf.r = r;
  nf.mu = std::move(mu);
  for (int j = 0; j <= r; ++j) nf.F.emplace_back(nf.n, Truncation::degree(r));
  for (int i = 0; i < nf.n; ++i) nf.F[0] += FormalSeries::variable(nf.n, Truncation::degree(r), i, nf.mu[i]);
  return nf;
}

FormalSeries NormalFormData::H() const {
  FormalSeries out = F.at(0);
  for (int i = 0; i < n; ++i) out -= FormalSeries::variable(n, out.truncation(), i, mu[i]);
  return out.degree_range(2, r);
}

void NormalFormData::add(int j, const std::vector<int>& exps, Complex coeff) {
  F.at(j) += FormalSeries::monomial(n, F.at(j).truncation(), exps, coeff);
}

std::vector<Violation> violations(const NormalFormData& nf) {
  std::vector<Violation> out;
  if (nf.n < 1) out.push_back({"n", "must be >= 1"});
  if (!(nf.d > 0.0) || !std::isfinite(nf.d)) out.push_back({"d", "trapped length must be positive"});
  if (nf.r < 1) out.push_back({"r", "order must be >= 1"});
  if (static_cast<int>(nf.mu.size()) != nf.n) {
    out.push_back({"mu", "needs exactly n entries"});
    return out;
  }
  for (double m : nf.mu) {
    if (!(m > 0.0) || !std::isfinite(m)) out.push_back({"mu", "entries must be positive"});
  }
  if (static_cast<int>(nf.F.size()) != nf.r + 1) {
    out.push_back({"F", "needs one polynomial per j = 0..r"});
    return out;
  }
  for (int j = 0; j <= nf.r; ++j) {
    const auto& Fj = nf.F[j];
    if (Fj.nvars() != nf.n) {
      out.push_back({fj(j), "polynomial must have n variables"});
      continue;
    }
    for (const auto& [m, c] : Fj.terms()) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) out.push_back({fj(j), "non-finite coefficient"});
      if (m.degree() > nf.r - j) {
        out.push_back({fj(j), "degree must be <= r - " + std::to_string(j)});
        break;
      }
    }
  }
  if (nf.F[0].nvars() == nf.n) {
    double scale = *std::max_element(nf.mu.begin(), nf.mu.end());
    if (std::abs(nf.F[0].constant_term()) > 0.0) out.push_back({"F[0]", "F_0(0) must vanish"});
    for (int i = 0; i < nf.n; ++i) {
      Complex lin = nf.F[0].coeff(Monomial().with_exponent(i, 1));
      if (std::abs(lin - nf.mu[i]) > kExactTol * scale) {
        out.push_back({"F[0]", "linear part must equal mu . iota"});
        break;
      }
    }
  }
  if (nf.r >= 1 && nf.F[1].nvars() == nf.n) {
    Complex f10 = nf.F[1].constant_term();
    if (std::abs(f10.imag()) > kExactTol * std::max(1.0, std::abs(f10))) {
      out.push_back({"F[1]", "F_1(0) must be real (Im F_1(0) = " + std::to_string(f10.imag()) + ")"});
    }
  }
  return out;
}

void validate(const NormalFormData& nf) {
  auto v = violations(nf);
  if (!v.empty()) throw ValidationError(v.front().field, v.front().message);
}

NormalFormData nf_from_json(const nlohmann::json& j, bool strict) {
  NormalFormData nf;
  try {
    nf.n = j.at("n").get<int>();
    nf.d = j.at("d").get<double>();
    nf.r = j.at("r").get<int>();
    nf.mu = j.at("mu").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("header", e.what());
  }
  if (nf.n < 1 || nf.n > series::Monomial::kMaxVars) throw ValidationError("n", "must lie in [1, 8]");
  if (nf.r < 1 || nf.r > 30) throw ValidationError("r", "must lie in [1, 30]");
  if (static_cast<int>(nf.mu.size()) != nf.n) throw ValidationError("mu", "needs exactly n entries");
  // Degree cap above r so that over-degree terms survive parsing and are
  // reported by the validator instead of being silently truncated.
  const auto t = Truncation::degree(std::min(series::Monomial::kMaxExponent, 2 * nf.r + 8));
  for (int q = 0; q <= nf.r; ++q) nf.F.emplace_back(nf.n, t);
  bool linear_given = false;
  if (j.contains("F")) {
    if (!j["F"].is_array()) throw ValidationError("F", "must be an array");
    for (const auto& block : j["F"]) {
      int idx = 0;
      try {
        idx = block.at("j").get<int>();
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError("F.j", e.what());
      }
      if (idx < 0 || idx > nf.r) throw ValidationError(fj(idx), "j must lie in 0..r");
      for (const auto& term : block.value("terms", nlohmann::json::array())) {
        std::vector<int> exps;
        Complex c;
        try {
          exps = term.at("iexp").get<std::vector<int>>();
          c = Complex(term.at("re").get<double>(), term.value("im", 0.0));
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError(fj(idx) + ".terms", e.what());
        }
        if (static_cast<int>(exps.size()) != nf.n) throw ValidationError(fj(idx) + ".terms", "iexp needs n entries");
        int deg = 0;
        for (int e : exps) {
          if (e < 0) throw ValidationError(fj(idx) + ".terms", "negative exponent");
          deg += e;
        }
        if (deg > 2 * nf.r + 8) throw ValidationError(fj(idx), "degree must be <= r - " + std::to_string(idx));
        if (idx == 0 && deg == 1) linear_given = true;
        nf.add(idx, exps, c);
      }
    }
  }
  if (!linear_given) {
    for (int i = 0; i < nf.n; ++i) nf.F[0] += FormalSeries::variable(nf.n, t, i, nf.mu[i]);
  }
  if (strict) validate(nf);
  if (violations(nf).empty()) {
    for (auto& Fj : nf.F) Fj = Fj.with_truncation(Truncation::degree(nf.r));
  }
  return nf;
}

nlohmann::json nf_to_json(const NormalFormData& nf) {
  nlohmann::json blocks = nlohmann::json::array();
  for (int j = 0; j < static_cast<int>(nf.F.size()); ++j) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : nf.F[j].terms()) {
      terms.push_back({{"iexp", m.exponents(nf.n)}, {"re", c.real()}, {"im", c.imag()}});
    }
    blocks.push_back({{"j", j}, {"terms", terms}});
  }
  return {{"n", nf.n}, {"d", nf.d}, {"r", nf.r}, {"mu", nf.mu}, {"F", blocks}};
}

std::vector<Complex> action_eigenvalues(const MultiIndex& alpha) {
  std::vector<Complex> y;
  y.reserve(alpha.size());
  // (2a + 1)/(2i) = -i (2a + 1)/2
  for (int a : alpha) y.emplace_back(0.0, -(2.0 * a + 1.0) / 2.0);
  return y;
}

DecomposedForm decompose(const NormalFormData& nf) {
  validate(nf);
  DecomposedForm df;
  df.n = nf.n;
  df.r = nf.r;
  df.mu = nf.mu;
  df.F1_0 = nf.F[1].constant_term();
  const auto t = Truncation::degree(nf.r);
  df.h.assign(nf.r + 1, FormalSeries(nf.n, t));
  df.k.assign(nf.r + 1, FormalSeries(nf.n, t));
  df.Fj0.assign(nf.r + 1, Complex{});
  const FormalSeries H = nf.H();
  for (int m = 2; m <= nf.r; ++m) df.h[m] = H.homogeneous_part(m);
  for (int i = 1; i <= nf.r; ++i) {
    df.Fj0[i] = nf.F[i].constant_term();
    for (const auto& [mono, c] : nf.F[i].terms()) {
      const int b = mono.degree();
      if (b == 0) continue;
      df.k[i + b - 1].add_term(mono, c);
    }
  }
  return df;
}

FormalSeries DecomposedForm::f(int m) const {
  FormalSeries out(n, series::Truncation::degree(r));
  if (m >= 2 && m <= r) out += h[m];
  if (m - 1 >= 1 && m - 1 <= r) out += k[m - 1];
  return out;
}

Complex DecomposedForm::q(int m, const MultiIndex& alpha) const {
  if (m < 2 || m > r) return {};
  return Fj0[m] + f(m).evaluate(action_eigenvalues(alpha));
}

Complex DecomposedForm::c0(const MultiIndex& alpha) const {
  Complex s = F1_0;
  auto y = action_eigenvalues(alpha);
  for (int i = 0; i < n; ++i) s += mu[i] * y[i];
  return s;
}

}  // namespace resforge::model
