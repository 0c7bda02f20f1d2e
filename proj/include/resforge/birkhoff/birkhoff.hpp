#pragma once

#include <optional>
#include <vector>

#include "resforge/series/formal_series.hpp"
#include "resforge/series/map_germ.hpp"

namespace resforge::birkhoff {

using series::Complex;
using series::FormalSeries;
using series::HamiltonianGerm;
using series::SymplecticMapGerm;

/// First integer vector k (by increasing |k|_inf, sign-normalised so the first
/// nonzero entry is positive) with |k . mu| <= 1e-12 |mu|, or nullopt.
std::optional<std::vector<int>> non_resonance_check(const std::vector<double>& mu, int kmax);

struct DiophantineReport {
  bool pass = true;
  /// min |mu . (alpha - beta)| over distinct alpha, beta with |alpha|, |beta| <= m.
  double min_gap = 0.0;
  /// e^{-D m} / C.
  double bound = 0.0;
  std::vector<int> alpha;
  std::vector<int> beta;
};

DiophantineReport diophantine_check(const std::vector<double>& mu, int m, double D, double C);

/// All multi-indices of length n with |alpha| <= m, graded then lexicographic.
std::vector<std::vector<int>> multi_indices(int n, int m);

/// p with exp(H_p) equal to the germ through total degree germ.order()
/// (p itself carries degrees up to order + 1). The germ must be in aligned
/// coordinates with linear part diag(nu, 1/nu), nu > 1.
/// Throws HyperbolicityError for a non-aligned or non-hyperbolic linear
/// part and SolverError when the re-expanded flow misses the germ by more
/// than `tol` (the germ is then not symplectic).
HamiltonianGerm interpolating_hamiltonian(const SymplecticMapGerm& germ, double tol = 1e-8);

/// F_0(iota) = mu . iota + H(iota).
struct NormalFormF0 {
  int n = 1;
  std::vector<double> mu;
  /// Polynomial in iota (n variables), no constant or linear part.
  FormalSeries H;

  /// Degree-j homogeneous part of H.
  FormalSeries h(int j) const { return H.homogeneous_part(j); }
};

struct BirkhoffResult {
  NormalFormF0 F0;
  /// p o B^{-1} = F_0(x xi) through degree 2 order.
  SymplecticMapGerm B;
  SymplecticMapGerm B_inverse;
  /// Homogeneous generators W_3, W_4, ...; B^{-1} = Phi_{W_3} o Phi_{W_4} o ...
  std::vector<FormalSeries> generators;
  /// p o B^{-1} in (x, xi) variables.
  FormalSeries normal_form;
};

/// Divisors with |mu . (a - b)| below this raise NearResonanceError.
inline constexpr double kSmallDivisor = 1e-10;

BirkhoffResult classical_bnf(const HamiltonianGerm& p, int order);

/// Polynomial in iota from a function of the products x_j xi_j only
/// (non-resonant terms are ignored).
FormalSeries actions_to_iota(const FormalSeries& resonant, int n);
/// The inverse substitution iota_j -> x_j xi_j.
FormalSeries iota_to_actions(const FormalSeries& poly, int n, series::Truncation t);

}  // namespace resforge::birkhoff
