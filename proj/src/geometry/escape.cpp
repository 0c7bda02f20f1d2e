#include "resforge/geometry/escape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "resforge/errors.hpp"
#include "resforge/parallel.hpp"

namespace resforge::geometry {

PhaseGrid PhaseGrid::full(const ObstaclePair& P, int ns, int nxi) {
  const double L = P.omega1.length();
  PhaseGrid g{P.a1 - 0.5 * L, P.a1 + 0.5 * L, -1.0, 1.0, ns, nxi};
  g.periodic = true;
  g.period = L;
  return g;
}

PhaseGrid PhaseGrid::window(const ObstaclePair& P, double half_s, double half_xi, int ns, int nxi) {
  if (half_xi >= 1.0) throw ValidationError("grid", "xi window must stay inside |xi| < 1");
  return PhaseGrid{P.a1 - half_s, P.a1 + half_s, -half_xi, half_xi, ns, nxi};
}

PhasePoint PhaseGrid::at(int i, int j) const {
  return {s_min + (i + 0.5) * ds(), xi_min + (j + 0.5) * dxi()};
}

std::size_t EscapePartition::count_plus(int j) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [j](const EscapeCounts& c) { return !c.glancing && c.jplus == j; }));
}

double EscapePartition::separation(int j) const {
  const int ns = grid.ns, nxi = grid.nxi;
  const double hs = grid.ds(), hx = grid.dxi();
  std::vector<std::pair<int, int>> upper;
  std::vector<char> lower(cells.size(), 0);
  bool any_lower = false;
  for (int i = 0; i < ns; ++i) {
    for (int k = 0; k < nxi; ++k) {
      const auto& c = at(i, k);
      if (c.glancing) continue;
      if (c.jplus >= j + 1) upper.emplace_back(i, k);
      if (c.jplus <= j - 1) {
        lower[static_cast<std::size_t>(i) * nxi + k] = 1;
        any_lower = true;
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  if (upper.empty() || !any_lower) return best;
  for (auto [i, k] : upper) {
    // Only cells closer than the current best can improve it.
    const int ri = std::isfinite(best) ? static_cast<int>(std::ceil(best / hs)) : ns;
    const int rk = std::isfinite(best) ? static_cast<int>(std::ceil(best / hx)) : nxi;
    for (int di = -std::min(ri, ns); di <= std::min(ri, ns); ++di) {
      int ii = i + di;
      if (grid.periodic) {
        ii = ((ii % ns) + ns) % ns;
      } else if (ii < 0 || ii >= ns) {
        continue;
      }
      for (int kk = std::max(0, k - rk); kk <= std::min(nxi - 1, k + rk); ++kk) {
        if (!lower[static_cast<std::size_t>(ii) * nxi + kk]) continue;
        const double dist = std::hypot(di * hs, (kk - k) * hx);
        best = std::min(best, dist);
      }
    }
  }
  return best;
}

void EscapePartition::write_csv(std::ostream& out) const {
  auto count = [](int c) { return c == kTrapped ? std::string("inf") : std::to_string(c); };
  out << "s,xi,jplus,jminus,glancing\n";
  for (int i = 0; i < grid.ns; ++i) {
    for (int k = 0; k < grid.nxi; ++k) {
      const auto p = grid.at(i, k);
      const auto& c = at(i, k);
      out << fmt::format("{:.17g},{:.17g},{},{},{}\n", p.s, p.xi, count(c.jplus), count(c.jminus), c.glancing ? 1 : 0);
    }
  }
}

namespace {

/// Iterates until escape; returns the number of successful steps, or
/// kTrapped after cap + 1 successes. Sets glancing on tangential contact.
template <class Map>
int escape_count(const Map& step, PhasePoint rho, int cap, bool& glancing) {
  for (int m = 0; m <= cap; ++m) {
    try {
      auto next = step(rho);
      if (!next) return m;
      rho = *next;
    } catch (const GlancingError&) {
      glancing = true;
      return m;
    }
    if (!(std::abs(rho.xi) < 1.0)) return m + 1;
  }
  return kTrapped;
}

}  // namespace

EscapePartition escape_partition(const ObstaclePair& P, const PhaseGrid& grid, int cap) {
  if (grid.ns <= 0 || grid.nxi <= 0) throw ValidationError("grid", "grid dimensions must be positive");
  if (grid.xi_min <= -1.0 - 1e-15 || grid.xi_max >= 1.0 + 1e-15) {
    throw ValidationError("grid", "grid must lie in the hyperbolic region |xi| < 1");
  }
  if (cap < 0) throw ValidationError("cap", "iteration cap must be non-negative");
  EscapePartition out{grid, cap, std::vector<EscapeCounts>(grid.size())};
  auto fwd = [&P](const PhasePoint& r) { return billiard_map(P, r); };
  auto bwd = [&P](const PhasePoint& r) { return inverse_billiard_map(P, r); };
  parallel_for(grid.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx / grid.nxi), k = static_cast<int>(idx % grid.nxi);
    const PhasePoint rho = grid.at(i, k);
    EscapeCounts c;
    c.jplus = escape_count(fwd, rho, cap, c.glancing);
    c.jminus = escape_count(bwd, rho, cap, c.glancing);
    out.cells[idx] = c;
  });
  return out;
}

double escape_function(double s, double x, double xi) { return 0.5 * s * std::log((s + x * x) / (s + xi * xi)); }

EscapeFunctionReport escape_function_check(const series::SymplecticMapGerm& germ, double h,
                                           const std::vector<PhasePoint>& samples, double c) {
  if (germ.n() != 1) throw DimensionError("escape function check needs a planar (n = 1) germ");
  if (!(h > 0.0 && h <= 0.1)) throw ValidationError("h", "h must lie in (0, 0.1]");
  EscapeFunctionReport rep;
  rep.h = h;
  rep.s = h * std::log(1.0 / h);
  const double inner_radius = c * std::sqrt(rep.s);
  for (const auto& p : samples) {
    const double r2 = p.s * p.s + p.xi * p.xi;
    if (r2 == 0.0) continue;
    const auto img = germ.evaluate_real({p.s, p.xi});
    const double inc = escape_function(rep.s, img[0], img[1]) - escape_function(rep.s, p.s, p.xi);
    if (std::sqrt(r2) <= inner_radius) {
      rep.inner_min = std::min(rep.inner_min, inc / r2);
      ++rep.inner_count;
    } else {
      rep.outer_min = std::min(rep.outer_min, inc / rep.s);
      ++rep.outer_count;
    }
  }
  return rep;
}

std::vector<PhasePoint> disc_samples(double radius, int rings, int angles) {
  std::vector<PhasePoint> out;
  for (int r = 1; r <= rings; ++r) {
    // Geometric radii so both the inner and outer regimes are populated.
    const double rad = radius * std::pow(1e-3, static_cast<double>(rings - r) / std::max(1, rings - 1));
    for (int a = 0; a < angles; ++a) {
      const double th = 2.0 * std::numbers::pi * (a + 0.5) / angles;
      out.push_back({rad * std::cos(th), rad * std::sin(th)});
    }
  }
  return out;
}

}  // namespace resforge::geometry
