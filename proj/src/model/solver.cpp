#include "resforge/model/solver.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "generic.hpp"

namespace resforge::model {

Complex pseudopole(long long k, const MultiIndex& alpha, double d, const std::vector<double>& mu) {
  double s = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) s += mu.at(j) * (2.0 * alpha[j] + 1.0);
  return {static_cast<double>(k) * std::numbers::pi / d, s / (4.0 * d)};
}

FValue eval_F(const NormalFormData& nf, const MultiIndex& alpha, Complex lambda, double smallness) {
  const int size = std::accumulate(alpha.begin(), alpha.end(), 0);
  FValue out;
  out.outside_regime = static_cast<double>(size) > smallness * std::abs(lambda);
  out.value = generic::eval_F<Complex>(nf, generic::action_values<Complex>(alpha), lambda);
  return out;
}

Complex eval_F_decomposed(const DecomposedForm& df, const MultiIndex& alpha, Complex lambda) {
  Complex total = df.c0(alpha);
  Complex lp = 1.0 / lambda;
  for (int m = 2; m <= df.r; ++m) {
    total += df.q(m, alpha) * lp;
    lp /= lambda;
  }
  return total / lambda;
}

Complex K_alpha(const DecomposedForm& df, const MultiIndex& alpha, Complex lambda) {
  return std::exp(Complex(0.0, -1.0) * (eval_F_decomposed(df, alpha, lambda) * lambda));
}

Complex K_alpha(const NormalFormData& nf, const MultiIndex& alpha, Complex lambda) {
  return K_alpha(decompose(nf), alpha, lambda);
}

Complex StringExpansion::evaluate(double k) const {
  Complex total;
  double kpow = k;
  for (const auto& c : a) {
    total += c * kpow;
    kpow /= k;
  }
  return total;
}

StringExpansion solve_string(const DecomposedForm& df, const MultiIndex& alpha, double d, int r) {
  if (r < 1) throw ValidationError("r", "order must be >= 1");
  if (static_cast<int>(alpha.size()) != df.n) throw DimensionError("multi-index length differs from n");
  return {alpha, generic::string_coefficients<Complex>(df, alpha, d, r)};
}

Complex model_equation(const NormalFormData& nf, const MultiIndex& alpha, long long k, Complex lambda) {
  return generic::model_equation<Complex>(nf, generic::action_values<Complex>(alpha), k, lambda);
}

Complex model_equation_derivative(const NormalFormData& nf, const MultiIndex& alpha, Complex lambda) {
  return generic::model_derivative<Complex>(generic::prepare(nf), generic::action_values<Complex>(alpha), lambda);
}

NewtonResult newton_root(const NormalFormData& nf, const MultiIndex& alpha, long long k, Complex seed,
                         const NewtonOptions& options) {
  auto out = generic::newton<Complex>(nf, alpha, k, seed, options.tol, options.max_iterations);
  return {out.lambda, out.iterations, out.residual};
}

}  // namespace resforge::model
