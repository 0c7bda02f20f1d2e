#include "resforge/lattice/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "resforge/birkhoff/birkhoff.hpp"
#include "resforge/errors.hpp"
#include "resforge/parallel.hpp"

namespace resforge::lattice {

namespace {

int abs_size(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

double mu_dot(const std::vector<double>& mu, const MultiIndex& a, const MultiIndex& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) s += mu[j] * (a[j] - b[j]);
  return s;
}

std::string join_alpha(const MultiIndex& a) {
  std::string out;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (j) out += ';';
    out += std::to_string(a[j]);
  }
  return out;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

void LatticeWindow::validate() const {
  if (!(A > 0.0)) throw ValidationError("window.A", "must be positive");
  if (!(B > 0.0)) throw ValidationError("window.B", "must be positive");
}

int alpha_cap(long long k, double C_alpha) {
  if (k < 1) return 0;
  return static_cast<int>(std::floor(C_alpha * std::log(static_cast<double>(k)) + 1e-12));
}

std::vector<ResonanceRecord> enumerate(const NormalFormData& nf, const LatticeWindow& window, long long kmax,
                                       double C_alpha, bool with_oracle, const EnumerateOptions& options) {
  window.validate();
  model::validate(nf);
  if (!(C_alpha >= 0.0)) throw ValidationError("C_alpha", "must be non-negative");
  std::vector<long long> ks = options.k_values;
  if (ks.empty()) {
    const auto kmin = static_cast<long long>(std::ceil(window.B * nf.d / std::numbers::pi));
    if (kmax < kmin) {
      throw ValidationError("kmax", fmt::format("must be at least ceil(B d / pi) = {}", kmin));
    }
    for (long long k = 1; k <= kmax; ++k) ks.push_back(k);
  } else {
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.front() < 1) throw ValidationError("k", "k values must be positive");
  }

  const auto df = model::decompose(nf);
  const int mmax = alpha_cap(ks.back(), C_alpha);
  auto alphas = birkhoff::multi_indices(nf.n, mmax);
  std::sort(alphas.begin(), alphas.end());
  std::vector<model::StringExpansion> strings;
  strings.reserve(alphas.size());
  const int r = options.order > 0 ? options.order : nf.r;
  for (const auto& a : alphas) strings.push_back(model::solve_string(df, a, nf.d, r));

  std::vector<std::vector<ResonanceRecord>> per_k(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    const long long k = ks[i];
    const int cap = alpha_cap(k, C_alpha);
    for (std::size_t q = 0; q < alphas.size(); ++q) {
      const auto& a = alphas[q];
      if (abs_size(a) > cap) continue;
      const Complex lam = strings[q].evaluate(static_cast<double>(k));
      if (!window.contains(lam)) continue;
      ResonanceRecord rec;
      rec.alpha = a;
      rec.k = k;
      rec.lambda_series = lam;
      rec.residual = std::abs(model::model_equation(nf, a, k, lam));
      if (with_oracle) {
        try {
          const auto root = model::newton_root(nf, a, k, model::pseudopole(k, a, nf.d, nf.mu), options.newton);
          rec.oracle_iterations = root.iterations;
          if (window.contains(root.lambda)) {
            rec.lambda_oracle = root.lambda;
          } else {
            rec.oracle_error = "oracle root outside the window";
          }
        } catch (const OracleError& e) {
          rec.oracle_error = e.what();
        }
      }
      per_k[i].push_back(std::move(rec));
    }
  });
  std::vector<ResonanceRecord> out;
  for (auto& v : per_k) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  return out;
}

std::vector<ClusterReport> cluster(const NormalFormData& nf, const std::vector<ResonanceRecord>& records,
                                   Complex lambda0, double rel_tol) {
  if (!(rel_tol >= 0.0)) throw ValidationError("tol_cluster", "must be non-negative");
  std::vector<MultiIndex> alphas;
  for (const auto& r : records) alphas.push_back(r.alpha);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  const auto df = model::decompose(nf);
  std::vector<Complex> K(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) K[i] = model::K_alpha(df, alphas[i], lambda0);

  std::vector<std::size_t> parent(alphas.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (std::size_t j = i + 1; j < alphas.size(); ++j) {
      const double scale = std::max(std::abs(K[i]), std::abs(K[j]));
      if (std::abs(K[i] - K[j]) <= rel_tol * scale) parent[find(j)] = find(i);
    }
  }
  // Components in order of their smallest alpha.
  std::map<std::size_t, std::size_t> slot;
  std::vector<ClusterReport> out;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto root = find(i);
    auto it = slot.find(root);
    if (it == slot.end()) {
      it = slot.emplace(root, out.size()).first;
      out.push_back({alphas[i], {}});
    }
    out[it->second].members.push_back(alphas[i]);
  }
  return out;
}

std::vector<ClusterReport> cluster(const NormalFormData& nf, const std::vector<ResonanceRecord>& records,
                                   double rel_tol) {
  long long kmax = 1;
  for (const auto& r : records) kmax = std::max(kmax, r.k);
  const MultiIndex zero(nf.n, 0);
  return cluster(nf, records, model::pseudopole(kmax, zero, nf.d, nf.mu), rel_tol);
}

void assign_clusters(std::vector<ResonanceRecord>& records, const std::vector<ClusterReport>& clusters) {
  std::map<MultiIndex, int> id;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const auto& m : clusters[c].members) id[m] = static_cast<int>(c);
  }
  for (auto& r : records) {
    auto it = id.find(r.alpha);
    if (it != id.end()) r.cluster_id = it->second;
  }
}

SeparationReport separation_report(const std::vector<ResonanceRecord>& records, double d,
                                   const std::vector<double>& mu, double D, double C, long long separation_from) {
  SeparationReport rep;
  rep.separation_from = separation_from;
  std::map<MultiIndex, std::map<long long, Complex>> by_alpha;
  std::map<long long, std::vector<const ResonanceRecord*>> by_k;
  for (const auto& r : records) {
    by_alpha[r.alpha][r.k] = r.lambda_series;
    by_k[r.k].push_back(&r);
  }
  const double spacing = std::numbers::pi / d;
  for (const auto& [a, string] : by_alpha) {
    for (auto it = string.begin(); it != string.end(); ++it) {
      auto next = std::next(it);
      if (next == string.end() || next->first != it->first + 1) continue;
      const double dev = std::abs(next->second.real() - it->second.real() - spacing);
      ++rep.re_spacing.count;
      rep.re_spacing.max_abs_deviation = std::max(rep.re_spacing.max_abs_deviation, dev);
      rep.re_spacing.max_scaled = std::max(rep.re_spacing.max_scaled, dev * static_cast<double>(it->first));
    }
  }

  std::vector<double> xs, ys;
  for (const auto& [k, recs] : by_k) {
    if (recs.size() < 2) continue;
    GapSample g;
    g.k = k;
    g.min_predicted_gap = INFINITY;
    for (const auto* r : recs) g.alpha_max = std::max(g.alpha_max, abs_size(r->alpha));
    for (std::size_t i = 0; i < recs.size(); ++i) {
      for (std::size_t j = i + 1; j < recs.size(); ++j) {
        const double predicted = mu_dot(mu, recs[i]->alpha, recs[j]->alpha) / (2.0 * d);
        const double gap = recs[i]->lambda_series.imag() - recs[j]->lambda_series.imag();
        g.remainder = std::max(g.remainder, std::abs(gap - predicted));
        g.min_predicted_gap = std::min(g.min_predicted_gap, std::abs(predicted));
      }
    }
    g.diophantine_gap = std::exp(-D * g.alpha_max) / (2.0 * d * C);
    const double lk = std::log(static_cast<double>(k));
    rep.max_scaled_remainder = std::max(rep.max_scaled_remainder, g.remainder * static_cast<double>(k) / (lk * lk));
    if (g.remainder > 0.0) {
      xs.push_back(lk);
      ys.push_back(std::log(g.remainder / (lk * lk)));
    }
    if (k >= separation_from && !(g.diophantine_gap > g.remainder)) rep.separated = false;
    rep.im_gaps.push_back(g);
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    rep.remainder_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return rep;
}

double oracle_ratio(const ResonanceRecord& rec, int r) {
  if (!rec.lambda_oracle) return NAN;
  const double k = static_cast<double>(rec.k);
  const double lk = std::log(k);
  return std::abs(rec.lambda_series - *rec.lambda_oracle) * std::pow(k, r) / std::pow(lk, r + 2);
}

void write_csv(std::ostream& out, const std::vector<ResonanceRecord>& records, const TableOptions& options) {
  out << "alpha,k,re_series,im_series,re_oracle,im_oracle,residual,cluster_id";
  if (options.ratio) out << ",ratio";
  out << '\n';
  for (const auto& r : records) {
    out << join_alpha(r.alpha) << ',' << r.k << ',' << num(r.lambda_series.real()) << ','
        << num(r.lambda_series.imag()) << ',';
    if (r.lambda_oracle) {
      out << num(r.lambda_oracle->real()) << ',' << num(r.lambda_oracle->imag());
    } else {
      out << ',';
    }
    out << ',' << num(r.residual) << ',';
    if (r.cluster_id) out << *r.cluster_id;
    if (options.ratio) {
      out << ',';
      if (r.lambda_oracle) out << num(oracle_ratio(r, options.r));
    }
    out << '\n';
  }
}

nlohmann::json to_json(const std::vector<ResonanceRecord>& records, const TableOptions& options) {
  auto arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["k"] = r.k;
    j["re_series"] = r.lambda_series.real();
    j["im_series"] = r.lambda_series.imag();
    j["re_oracle"] = r.lambda_oracle ? nlohmann::json(r.lambda_oracle->real()) : nlohmann::json(nullptr);
    j["im_oracle"] = r.lambda_oracle ? nlohmann::json(r.lambda_oracle->imag()) : nlohmann::json(nullptr);
    j["residual"] = r.residual;
    j["cluster_id"] = r.cluster_id ? nlohmann::json(*r.cluster_id) : nlohmann::json(nullptr);
    if (options.ratio) j["ratio"] = r.lambda_oracle ? nlohmann::json(oracle_ratio(r, options.r)) : nlohmann::json(nullptr);
    if (!r.oracle_error.empty()) j["oracle_error"] = r.oracle_error;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<ResonanceRecord> records_from_json(const nlohmann::json& j) {
  std::vector<ResonanceRecord> out;
  try {
    for (const auto& e : j) {
      ResonanceRecord r;
      r.alpha = e.at("alpha").get<MultiIndex>();
      r.k = e.at("k").get<long long>();
      r.lambda_series = {e.at("re_series").get<double>(), e.at("im_series").get<double>()};
      if (!e.at("re_oracle").is_null()) {
        r.lambda_oracle = Complex(e.at("re_oracle").get<double>(), e.at("im_oracle").get<double>());
      }
      r.residual = e.at("residual").get<double>();
      if (!e.at("cluster_id").is_null()) r.cluster_id = e.at("cluster_id").get<int>();
      r.oracle_error = e.value("oracle_error", std::string());
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("records", e.what());
  }
  return out;
}

}  // namespace resforge::lattice
