#pragma once

#include <vector>

#include <Eigen/Dense>

#include "resforge/series/formal_series.hpp"

namespace resforge::series {

/// Hamiltonian p(x, xi) in 2n canonical variables with p(0) = 0, dp(0) = 0
/// and quadratic part exactly sum_j mu_j x_j xi_j, mu_j > 0.
class HamiltonianGerm {
 public:
  /// Validates the normalisation of the quadratic part (tolerance relative
  /// to max mu). Throws ValidationError otherwise.
  explicit HamiltonianGerm(FormalSeries p);

  int n() const { return p_.nvars() / 2; }
  const FormalSeries& series() const { return p_; }
  const std::vector<double>& mu() const { return mu_; }

 private:
  FormalSeries p_;
  std::vector<double> mu_;
};

/// Taylor germ of a map (R^2n, 0) -> (R^2n, 0), one FormalSeries per image
/// coordinate, all truncated at total degree `order`.
class SymplecticMapGerm {
 public:
  SymplecticMapGerm(int n, int order, std::vector<FormalSeries> components);

  static SymplecticMapGerm identity(int n, int order);
  /// Linear germ z -> M z.
  static SymplecticMapGerm linear(const Eigen::MatrixXd& m, int order);

  int n() const { return n_; }
  int order() const { return order_; }
  const std::vector<FormalSeries>& components() const { return components_; }
  const FormalSeries& component(int i) const { return components_.at(i); }

  std::vector<Complex> evaluate(const std::vector<Complex>& point) const;
  std::vector<double> evaluate_real(const std::vector<double>& point) const;

  /// Real part of the Jacobian at the origin.
  Eigen::MatrixXd linear_part() const;

  /// Same germ truncated at a lower order.
  SymplecticMapGerm truncated(int order) const;

  /// Largest coefficient of D^T Omega D - Omega, truncated at degree
  /// order - 1. Zero (to roundoff) for a symplectic germ.
  double symplectic_defect() const;

 private:
  int n_;
  int order_;
  std::vector<FormalSeries> components_;
};

/// (outer o inner)(z) = outer(inner(z)); result order is the smaller one.
SymplecticMapGerm compose(const SymplecticMapGerm& outer, const SymplecticMapGerm& inner);

double max_abs_difference(const SymplecticMapGerm& a, const SymplecticMapGerm& b);

/// Time-one map of H_p as a Lie series, truncated at total degree `order`.
SymplecticMapGerm hamiltonian_flow_map(const HamiltonianGerm& p, int order);

/// Same for an arbitrary polynomial generator (no normalisation required);
/// used for the homogeneous generators of normalising transforms.
SymplecticMapGerm flow_of(const FormalSeries& generator, int n, int order);

}  // namespace resforge::series
