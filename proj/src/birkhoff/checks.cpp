#include <cmath>

#include "resforge/birkhoff/birkhoff.hpp"

namespace resforge::birkhoff {

namespace {

double dot(const std::vector<double>& mu, const std::vector<int>& k) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * k[i];
  return s;
}

}  // namespace

std::optional<std::vector<int>> non_resonance_check(const std::vector<double>& mu, int kmax) {
  const int n = static_cast<int>(mu.size());
  double norm = 0.0;
  for (double m : mu) norm += m * m;
  const double tol = 1e-12 * std::sqrt(norm);
  for (int shell = 1; shell <= kmax; ++shell) {
    // Odometer over [-shell, shell]^n, keeping vectors on the shell boundary.
    std::vector<int> k(n, -shell);
    while (true) {
      int inf = 0, first = 0;
      for (int v : k) {
        inf = std::max(inf, std::abs(v));
        if (first == 0) first = v;
      }
      if (inf == shell && first > 0 && std::abs(dot(mu, k)) <= tol) return k;
      int i = n - 1;
      while (i >= 0 && k[i] == shell) k[i--] = -shell;
      if (i < 0) break;
      ++k[i];
    }
  }
  return std::nullopt;
}

namespace {

void compositions(int total, std::size_t pos, std::vector<int>& a, std::vector<std::vector<int>>& out) {
  if (pos + 1 == a.size()) {
    a[pos] = total;
    out.push_back(a);
    return;
  }
  for (int v = total; v >= 0; --v) {
    a[pos] = v;
    compositions(total - v, pos + 1, a, out);
  }
}

}  // namespace

std::vector<std::vector<int>> multi_indices(int n, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  for (int total = 0; total <= m; ++total) compositions(total, 0, a, out);
  return out;
}

DiophantineReport diophantine_check(const std::vector<double>& mu, int m, double D, double C) {
  DiophantineReport rep;
  rep.bound = std::exp(-D * m) / C;
  const auto idx = multi_indices(static_cast<int>(mu.size()), m);
  rep.min_gap = INFINITY;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      std::vector<int> diff(mu.size());
      for (std::size_t q = 0; q < mu.size(); ++q) diff[q] = idx[i][q] - idx[j][q];
      const double gap = std::abs(dot(mu, diff));
      if (gap < rep.min_gap) {
        rep.min_gap = gap;
        rep.alpha = idx[i];
        rep.beta = idx[j];
      }
    }
  }
  rep.pass = rep.min_gap >= rep.bound;
  return rep;
}

}  // namespace resforge::birkhoff
