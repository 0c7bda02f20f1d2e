// 50-digit evaluation of string residuals and oracle distances. At k ~ 1e6
// and r = 3 these quantities sit near 1e-24, far below double resolution of
// lambda itself.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "generic.hpp"
#include "resforge/model/solver.hpp"

namespace resforge::model {

using HPComplex = boost::multiprecision::cpp_complex_50;

namespace generic {
template <>
struct Scalar<HPComplex> {
  using Real = boost::multiprecision::cpp_bin_float_50;
  static double to_double(const Real& x) { return x.convert_to<double>(); }
};
}  // namespace generic

double residual_certificate(const NormalFormData& nf, const MultiIndex& alpha, long long k, int r) {
  const DecomposedForm df = decompose(nf);
  const auto a = generic::string_coefficients<HPComplex>(df, alpha, nf.d, r);
  const HPComplex lambda = generic::string_value(a, k);
  return generic::abs_d(generic::model_equation<HPComplex>(nf, generic::action_values<HPComplex>(alpha), k, lambda));
}

OracleComparison compare_with_oracle(const NormalFormData& nf, const MultiIndex& alpha, long long k, int r,
                                     double tol) {
  const DecomposedForm df = decompose(nf);
  const auto a = generic::string_coefficients<HPComplex>(df, alpha, nf.d, r);
  const HPComplex series_value = generic::string_value(a, k);
  using R = generic::RealOf<HPComplex>;
  R im(0);
  for (std::size_t j = 0; j < alpha.size(); ++j) im += R(nf.mu[j]) * R(2 * alpha[j] + 1);
  const HPComplex seed(R(static_cast<double>(k)) * boost::math::constants::pi<R>() / R(nf.d), im / (R(4) * R(nf.d)));
  const auto root = generic::newton<HPComplex>(nf, alpha, k, seed, tol, 50);
  return {generic::abs_d(HPComplex(series_value - root.lambda)), root.iterations, root.residual};
}

}  // namespace resforge::model
