#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "resforge/geometry/billiard.hpp"

namespace resforge::geometry {

/// Cell-centred rectangular lattice in (s, xi). A grid spanning the whole
/// boundary length is treated as periodic in s.
struct PhaseGrid {
  double s_min = 0.0, s_max = 0.0;
  double xi_min = -1.0, xi_max = 1.0;
  int ns = 0, nxi = 0;

  /// Whole hyperbolic region: s over one period centred at a1, |xi| < 1.
  static PhaseGrid full(const ObstaclePair& P, int ns, int nxi);
  /// Box centred at (a1, 0).
  static PhaseGrid window(const ObstaclePair& P, double half_s, double half_xi, int ns, int nxi);

  double ds() const { return (s_max - s_min) / ns; }
  double dxi() const { return (xi_max - xi_min) / nxi; }
  PhasePoint at(int i, int j) const;
  std::size_t size() const { return static_cast<std::size_t>(ns) * nxi; }
  bool periodic = false;
  double period = 0.0;
};

inline constexpr int kTrapped = std::numeric_limits<int>::max();

struct EscapeCounts {
  /// Successful iterations before escape, in 0..N, or kTrapped.
  int jplus = 0;
  int jminus = 0;
  bool glancing = false;
};

struct EscapePartition {
  PhaseGrid grid;
  int cap = 0;
  /// Row-major: index i * nxi + j for s index i, xi index j.
  std::vector<EscapeCounts> cells;

  const EscapeCounts& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * grid.nxi + j]; }
  /// Number of non-glancing cells with jplus == j (kTrapped allowed).
  std::size_t count_plus(int j) const;
  /// Min distance between {jplus >= j + 1} and {jplus <= j - 1}
  /// (glancing cells excluded); +inf if either set is empty.
  double separation(int j) const;
  /// CSV with header s,xi,jplus,jminus,glancing; trapped counts print "inf".
  void write_csv(std::ostream& out) const;
};

/// Forward and backward escape counts of every grid point, iterating kappa at
/// most cap + 1 times. Parallel over grid points.
EscapePartition escape_partition(const ObstaclePair& P, const PhaseGrid& grid, int cap);

struct EscapeFunctionReport {
  double h = 0.0;
  /// h ln(1/h).
  double s = 0.0;
  /// min (G(kappa rho) - G(rho)) / |rho|^2 over samples with |rho| <= c sqrt(s).
  double inner_min = std::numeric_limits<double>::infinity();
  /// min (G(kappa rho) - G(rho)) / s over samples with |rho| > c sqrt(s).
  double outer_min = std::numeric_limits<double>::infinity();
  int inner_count = 0;
  int outer_count = 0;
  bool pass() const { return inner_count > 0 && outer_count > 0 && inner_min > 0.0 && outer_min > 0.0; }
};

/// G(x, xi) = s/2 ln((s + x^2) / (s + xi^2)) with s = h ln(1/h).
double escape_function(double s, double x, double xi);

/// Increment of the escape function along one step of an aligned germ (n = 1).
EscapeFunctionReport escape_function_check(const series::SymplecticMapGerm& germ, double h,
                                           const std::vector<PhasePoint>& samples, double c = 0.1);

/// Polar samples: `rings` radii up to `radius`, `angles` per ring.
std::vector<PhasePoint> disc_samples(double radius, int rings, int angles);

}  // namespace resforge::geometry
