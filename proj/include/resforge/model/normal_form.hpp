#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "resforge/series/formal_series.hpp"

namespace resforge::model {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;
using series::FormalSeries;

/// F^r(iota; h) = F_0(iota) + h F_1(iota) + ... + h^r F_r(iota) together with
/// the trapped length d and the log-eigenvalues mu. F[j] is a polynomial in
/// the n action variables iota (FormalSeries with n variables).
struct NormalFormData {
  int n = 1;
  double d = 1.0;
  int r = 1;
  std::vector<double> mu;
  std::vector<FormalSeries> F;

  /// Zero corrections, F_0 = mu . iota.
  static NormalFormData linear(double d, std::vector<double> mu, int r);

  /// F_0 - mu . iota.
  FormalSeries H() const;
  /// Adds coeff * iota^exps to F_j.
  void add(int j, const std::vector<int>& exps, Complex coeff);
};

struct Violation {
  std::string field;
  std::string message;
};

/// Every violated invariant; empty when the data is valid.
std::vector<Violation> violations(const NormalFormData& nf);
/// Throws ValidationError for the first violation.
void validate(const NormalFormData& nf);

/// Parses the normal-form JSON document. Linear terms of F_0 may be omitted,
/// in which case they are filled in from mu. With strict = true the result
/// is validated; otherwise only structural errors throw.
NormalFormData nf_from_json(const nlohmann::json& j, bool strict = true);
nlohmann::json nf_to_json(const NormalFormData& nf);

/// Per-degree pieces of the action expansion: q_m(y) = F_m(0) + h_m(y) +
/// k_{m-1}(y), m = 2..r, with y = (2 alpha + 1)/(2i).
struct DecomposedForm {
  int n = 1;
  int r = 1;
  std::vector<double> mu;
  Complex F1_0;
  /// h[m]: degree-m homogeneous part of H (m = 2..r; lower entries zero).
  std::vector<FormalSeries> h;
  /// k[m]: sum of F_i terms with i >= 1, |beta| >= 1, i + |beta| - 1 = m.
  std::vector<FormalSeries> k;
  /// Fj0[m] = F_m(0).
  std::vector<Complex> Fj0;

  /// f_m = h_m + k_{m-1} as a polynomial in y.
  FormalSeries f(int m) const;
  /// q_m evaluated at y = (2 alpha + 1)/(2i); zero for m > r.
  Complex q(int m, const MultiIndex& alpha) const;
  /// mu . y + F_1(0), the constant term of lambda F^r.
  Complex c0(const MultiIndex& alpha) const;
};

DecomposedForm decompose(const NormalFormData& nf);

/// y_j = (2 alpha_j + 1)/(2i).
std::vector<Complex> action_eigenvalues(const MultiIndex& alpha);

}  // namespace resforge::model
