#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "resforge/model/solver.hpp"

namespace resforge::lattice {

using model::Complex;
using model::MultiIndex;
using model::NormalFormData;

/// {Im lambda < A ln Re lambda, Re lambda > B}.
struct LatticeWindow {
  double A = 1.0;
  double B = 1.0;

  bool contains(Complex lambda) const {
    return lambda.real() > B && lambda.imag() < A * std::log(lambda.real());
  }
  /// Throws ValidationError unless A, B > 0.
  void validate() const;
};

struct ResonanceRecord {
  MultiIndex alpha;
  long long k = 0;
  Complex lambda_series;
  std::optional<Complex> lambda_oracle;
  int oracle_iterations = 0;
  /// Why the oracle root is missing when it was requested.
  std::string oracle_error;
  /// |g(lambda_series)| for the model equation of the full normal form.
  double residual = 0.0;
  std::optional<int> cluster_id;
};

struct EnumerateOptions {
  /// Explicit k values to scan instead of 1..kmax (sorted and deduplicated).
  std::vector<long long> k_values;
  /// Expansion order of the string values; 0 means nf.r.
  int order = 0;
  model::NewtonOptions newton;
};

/// Largest |alpha| admitted at k: floor(C_alpha ln k).
int alpha_cap(long long k, double C_alpha);

/// Every (alpha, k) with k <= kmax, |alpha| <= C_alpha ln k and the order-r
/// string value inside the window, sorted by (k, alpha). With `with_oracle`,
/// the Newton root seeded at the pseudopole is attached; failures are kept
/// inline in oracle_error. Parallel over k.
std::vector<ResonanceRecord> enumerate(const NormalFormData& nf, const LatticeWindow& window, long long kmax,
                                       double C_alpha, bool with_oracle, const EnumerateOptions& options = {});

inline constexpr double kDefaultClusterTol = 1e-9;

struct ClusterReport {
  MultiIndex reference;
  std::vector<MultiIndex> members;
  int size() const { return static_cast<int>(members.size()); }
};

/// Partition of the distinct alphas in `records`: alpha and beta are linked
/// when |K_alpha(lambda0) - K_beta(lambda0)| <= rel_tol * max(|K_alpha|, |K_beta|),
/// and clusters are the connected components. rel_tol = 0 is exact equality.
std::vector<ClusterReport> cluster(const NormalFormData& nf, const std::vector<ResonanceRecord>& records,
                                   Complex lambda0, double rel_tol = kDefaultClusterTol);
/// lambda0 defaults to the pseudopole of alpha = 0 at the largest k present.
std::vector<ClusterReport> cluster(const NormalFormData& nf, const std::vector<ResonanceRecord>& records,
                                   double rel_tol = kDefaultClusterTol);

/// Sets cluster_id on every record to the index of its cluster.
void assign_clusters(std::vector<ResonanceRecord>& records, const std::vector<ClusterReport>& clusters);

struct SpacingStats {
  int count = 0;
  /// max |Re lambda(alpha, k+1) - Re lambda(alpha, k) - pi/d|.
  double max_abs_deviation = 0.0;
  /// max of that deviation times k.
  double max_scaled = 0.0;
};

struct GapSample {
  long long k = 0;
  /// max over pairs at this k of |Im gap - mu.(alpha - beta)/(2d)|.
  double remainder = 0.0;
  /// min over pairs at this k of |mu.(alpha - beta)|/(2d) (alpha != beta).
  double min_predicted_gap = 0.0;
  /// e^{-D m} / (2 d C) with m the largest |alpha| present at this k.
  double diophantine_gap = 0.0;
  int alpha_max = 0;
};

struct SeparationReport {
  SpacingStats re_spacing;
  std::vector<GapSample> im_gaps;
  /// Least-squares slope of log(remainder / ln^2 k) against log k.
  double remainder_slope = 0.0;
  /// max over k of remainder * k / ln^2 k.
  double max_scaled_remainder = 0.0;
  /// Per k >= separation_from: diophantine_gap > remainder.
  bool separated = true;
  long long separation_from = 0;
};

/// Re spacing along each string and Im gaps across strings at fixed k.
/// D, C are the Diophantine constants for the bound e^{-D m}/C.
SeparationReport separation_report(const std::vector<ResonanceRecord>& records, double d,
                                   const std::vector<double>& mu, double D = 1.0, double C = 1.0,
                                   long long separation_from = 0);

struct TableOptions {
  /// Adds a ratio column |lambda_series - lambda_oracle| k^r / (ln k)^{r+2}.
  bool ratio = false;
  int r = 0;
};

/// alpha (semicolon-joined), k, re_series, im_series, re_oracle, im_oracle,
/// residual, cluster_id[, ratio]; %.17g floats, empty cells when absent.
void write_csv(std::ostream& out, const std::vector<ResonanceRecord>& records, const TableOptions& options = {});
/// Array of objects with the same field names (null when absent) plus
/// oracle_error when set.
nlohmann::json to_json(const std::vector<ResonanceRecord>& records, const TableOptions& options = {});
std::vector<ResonanceRecord> records_from_json(const nlohmann::json& j);

double oracle_ratio(const ResonanceRecord& rec, int r);

}  // namespace resforge::lattice
