#pragma once

#include <string>
#include <vector>

#include "resforge/model/normal_form.hpp"

namespace resforge::model {

/// kpi/d + (i/4d) sum_j mu_j (2 alpha_j + 1).
Complex pseudopole(long long k, const MultiIndex& alpha, double d, const std::vector<double>& mu);

struct FValue {
  Complex value;
  /// |alpha|/|lambda| exceeded the smallness bound; the value is still computed.
  bool outside_regime = false;
};

inline constexpr double kDefaultSmallness = 0.2;

/// F^r at iota = (2 alpha + 1)/(2 i lambda), h = 1/lambda, by direct
/// polynomial evaluation.
FValue eval_F(const NormalFormData& nf, const MultiIndex& alpha, Complex lambda,
              double smallness = kDefaultSmallness);
/// Same quantity through the decomposition: (c0 + sum_m q_m lambda^{1-m}) / lambda.
Complex eval_F_decomposed(const DecomposedForm& df, const MultiIndex& alpha, Complex lambda);

/// exp(-i (c0 + sum_m q_m lambda^{1-m})), i.e. exp(-i lambda F^r).
Complex K_alpha(const DecomposedForm& df, const MultiIndex& alpha, Complex lambda);
Complex K_alpha(const NormalFormData& nf, const MultiIndex& alpha, Complex lambda);

/// lambda(alpha, k) / k = sum_j a_j k^{-j}, j = 0..r+1.
struct StringExpansion {
  MultiIndex alpha;
  std::vector<Complex> a;

  int order() const { return static_cast<int>(a.size()) - 2; }
  Complex evaluate(double k) const;
};

StringExpansion solve_string(const DecomposedForm& df, const MultiIndex& alpha, double d, int r);

/// Model equation g(lambda) = 2 d lambda + lambda F^r(y/lambda; 1/lambda) - 2 pi k
/// and its lambda-derivative, in double precision.
Complex model_equation(const NormalFormData& nf, const MultiIndex& alpha, long long k, Complex lambda);
Complex model_equation_derivative(const NormalFormData& nf, const MultiIndex& alpha, Complex lambda);

struct NewtonOptions {
  /// Converged when |g| < tol * k.
  double tol = 1e-12;
  int max_iterations = 50;
};

struct NewtonResult {
  Complex lambda;
  int iterations = 0;
  double residual = 0.0;
};

/// Complex Newton on the model equation started from `seed`. Throws
/// OracleError on non-convergence or when |g'| < d.
NewtonResult newton_root(const NormalFormData& nf, const MultiIndex& alpha, long long k, Complex seed,
                         const NewtonOptions& options = {});

/// |g(lambda_r)| for the order-r string value lambda_r, evaluated with
/// 50-digit arithmetic against the full normal form nf.
double residual_certificate(const NormalFormData& nf, const MultiIndex& alpha, long long k, int r);

/// |lambda_r - lambda_newton| with both sides in 50-digit arithmetic; Newton
/// is run to `tol` (relative to k). Returns the distance and the iteration count.
struct OracleComparison {
  double distance = 0.0;
  int iterations = 0;
  double residual = 0.0;
};
OracleComparison compare_with_oracle(const NormalFormData& nf, const MultiIndex& alpha, long long k, int r,
                                     double tol = 1e-40);

}  // namespace resforge::model
