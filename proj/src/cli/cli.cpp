#include "resforge/cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "resforge/birkhoff/birkhoff.hpp"
#include "resforge/errors.hpp"
#include "resforge/geometry/escape.hpp"
#include "resforge/model/normal_form.hpp"

namespace resforge::cli {

namespace {

enum class Format { Csv, Json };

struct RunConfig {
  std::string input;
  std::string output;
  Format format = Format::Csv;
  // geometry
  int order = 0;
  int escape_grid = 0;
  int escape_cap = 6;
  std::string escape_out = "escape_partition.csv";
  std::string emit_nf;
  std::string overlay;
  // strings / check
  std::vector<double> window{1.0, 1.0};
  long long kmax = 100;
  double C_alpha = 1.0;
  bool oracle = false;
  double tol_newton = 1e-12;
  double tol_cluster = lattice::kDefaultClusterTol;
  std::string svg;
  std::string coeffs;
  double dioph_D = 1.0;
  double dioph_C = 1.0;
};

/// Significant-digit formatting for human-readable reports.
std::string sig10(double x) { return fmt::format("{:#.10g}", x); }
std::string full(double x) { return fmt::format("{:.17g}", x); }

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError(path, "cannot open output file");
  f << text;
}

std::string join(const std::vector<int>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

/// Sign-normalised difference vector (first non-zero entry positive).
std::vector<int> witness(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = a[i] - b[i];
  for (int v : w) {
    if (v == 0) continue;
    if (v < 0) {
      for (int& x : w) x = -x;
    }
    break;
  }
  return w;
}

model::NormalFormData build_normal_form(const geometry::ObstaclePair& P, const geometry::KappaGerm& germ, int r,
                                        const std::string& overlay_path, std::ostream& err) {
  const auto p = birkhoff::interpolating_hamiltonian(germ.aligned);
  const auto bnf = birkhoff::classical_bnf(p, r);
  nlohmann::json doc;
  doc["n"] = 1;
  doc["d"] = P.d;
  doc["r"] = r;
  doc["mu"] = bnf.F0.mu;
  auto f0 = nlohmann::json::array();
  f0.push_back({{"iexp", {1}}, {"re", bnf.F0.mu[0]}, {"im", 0.0}});
  for (const auto& [m, c] : bnf.F0.H.terms()) {
    f0.push_back({{"iexp", m.exponents(1)}, {"re", c.real()}, {"im", c.imag()}});
  }
  doc["F"] = nlohmann::json::array({{{"j", 0}, {"terms", f0}}});
  if (overlay_path.empty()) {
    err << "notice: no overlay given; the corrections F_j (j >= 1) are set to zero. "
           "They are not computable from the geometry and must be supplied with --overlay.\n";
  } else {
    const auto ov = load_document(overlay_path);
    if (!ov.contains("F") || !ov.at("F").is_array()) throw ValidationError("overlay.F", "expected an array of blocks");
    for (const auto& block : ov.at("F")) {
      if (block.value("j", 0) < 1) throw ValidationError("overlay.F.j", "overlay blocks must have j >= 1");
      doc["F"].push_back(block);
    }
  }
  return model::nf_from_json(doc, true);
}

int cmd_geometry(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto [c1, c2] = geometry::obstacles_from_json(load_document(cfg.input));
  const auto P = geometry::trapped_ray(c1, c2);
  const auto L = geometry::poincare_linearization(P);
  const int nf_order = cfg.order > 0 ? cfg.order : 3;
  // The germ must reach degree 2r - 1 for an order-r normal form.
  const int germ_order = cfg.emit_nf.empty() ? std::min(8, std::max(1, 2 * nf_order - 1)) : 2 * nf_order - 1;
  if (germ_order > 8) throw ValidationError("order", "normal-form order above 4 needs a germ beyond degree 8");
  const auto germ = geometry::kappa_germ(P, germ_order);

  std::optional<model::NormalFormData> nf;
  if (!cfg.emit_nf.empty()) {
    nf = build_normal_form(P, germ, nf_order, cfg.overlay, err);
    write_text(cfg.emit_nf, model::nf_to_json(*nf).dump(2) + "\n", out);
  }
  if (cfg.escape_grid > 0) {
    const auto E = geometry::escape_partition(P, geometry::PhaseGrid::full(P, cfg.escape_grid, cfg.escape_grid),
                                              cfg.escape_cap);
    std::ostringstream csv;
    E.write_csv(csv);
    write_text(cfg.escape_out, csv.str(), out);
  }

  if (cfg.format == Format::Json) {
    nlohmann::json j;
    j["d"] = P.d;
    j["a1"] = P.a1;
    j["a2"] = P.a2;
    j["foot1"] = {P.foot1.x(), P.foot1.y()};
    j["foot2"] = {P.foot2.x(), P.foot2.y()};
    j["normality_residual"] = P.normality_residual;
    j["nu"] = L.nu;
    j["mu"] = std::log(L.nu);
    j["jacobian"] = {{L.jacobian(0, 0), L.jacobian(0, 1)}, {L.jacobian(1, 0), L.jacobian(1, 1)}};
    j["det"] = L.det;
    j["step_agreement"] = L.step_agreement;
    j["germ"] = {{"order", germ_order},
                 {"nu", germ.nu},
                 {"validation_errors", germ.validation_errors},
                 {"components", {series::to_json(germ.aligned.component(0)), series::to_json(germ.aligned.component(1))}}};
    write_text(cfg.output, j.dump(2) + "\n", out);
  } else {
    std::string s;
    s += "d = " + sig10(P.d) + "\n";
    s += "a1 = " + sig10(P.a1) + "\n";
    s += "a2 = " + sig10(P.a2) + "\n";
    s += "foot1 = (" + sig10(P.foot1.x()) + ", " + sig10(P.foot1.y()) + ")\n";
    s += "foot2 = (" + sig10(P.foot2.x()) + ", " + sig10(P.foot2.y()) + ")\n";
    s += "nu = " + sig10(L.nu) + "\n";
    s += "mu = ln nu = " + sig10(std::log(L.nu)) + "\n";
    s += "det Dkappa = " + sig10(L.det) + "\n";
    s += "finite-difference step agreement = " + fmt::format("{:.3e}", L.step_agreement) + "\n";
    s += fmt::format("germ order = {}, validation errors = [{:.3e}, {:.3e}, {:.3e}]\n", germ_order,
                     germ.validation_errors[0], germ.validation_errors[1], germ.validation_errors[2]);
    if (nf) {
      s += "normal form F_0(iota) = " + sig10(std::log(L.nu)) + " iota";
      const auto h = nf->H();
      for (const auto& [m, c] : h.terms()) s += fmt::format(" {:+.10g} iota^{}", c.real(), m.exponent(0));
      s += "\n";
    }
    write_text(cfg.output, s, out);
  }
  return kOk;
}

model::NormalFormData load_nf(const std::string& path) {
  return model::nf_from_json(load_document(path), true);
}

lattice::LatticeWindow window_of(const RunConfig& cfg) { return {cfg.window.at(0), cfg.window.at(1)}; }

int cmd_strings(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto nf = load_nf(cfg.input);
  const int r = cfg.order > 0 ? cfg.order : nf.r;
  lattice::EnumerateOptions opt;
  opt.order = r;
  opt.newton.tol = cfg.tol_newton;
  auto records = lattice::enumerate(nf, window_of(cfg), cfg.kmax, cfg.C_alpha, cfg.oracle, opt);
  lattice::assign_clusters(records, lattice::cluster(nf, records, cfg.tol_cluster));
  const lattice::TableOptions table{cfg.oracle, r};

  std::ostringstream main;
  if (cfg.format == Format::Json) {
    main << lattice::to_json(records, table).dump(2) << "\n";
  } else {
    lattice::write_csv(main, records, table);
  }
  write_text(cfg.output, main.str(), out);

  if (!cfg.coeffs.empty()) {
    const auto df = model::decompose(nf);
    const int cap = lattice::alpha_cap(cfg.kmax, cfg.C_alpha);
    auto alphas = birkhoff::multi_indices(nf.n, cap);
    std::sort(alphas.begin(), alphas.end());
    std::ostringstream c;
    if (cfg.format == Format::Json) {
      auto arr = nlohmann::json::array();
      for (const auto& a : alphas) {
        const auto s = model::solve_string(df, a, nf.d, r);
        auto coeffs = nlohmann::json::array();
        for (const auto& v : s.a) coeffs.push_back({{"re", v.real()}, {"im", v.imag()}});
        arr.push_back({{"alpha", a}, {"a", coeffs}});
      }
      c << arr.dump(2) << "\n";
    } else {
      c << "alpha,j,re,im\n";
      for (const auto& a : alphas) {
        const auto s = model::solve_string(df, a, nf.d, r);
        for (std::size_t j = 0; j < s.a.size(); ++j) {
          c << join(a, ";") << ',' << j << ',' << full(s.a[j].real()) << ',' << full(s.a[j].imag()) << '\n';
        }
      }
    }
    write_text(cfg.coeffs, c.str(), out);
  }
  if (!cfg.svg.empty()) {
    write_text(cfg.svg, render_svg(records, {800, 500, fmt::format("strings, order {}", r)}), out);
  }
  std::size_t failures = 0;
  for (const auto& rec : records) failures += !rec.oracle_error.empty();
  err << fmt::format("{} records", records.size());
  if (cfg.oracle) err << fmt::format(", {} oracle failures", failures);
  err << "\n";
  return kOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto nf = model::nf_from_json(load_document(cfg.input), false);
  bool all = true;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    all = all && pass;
    out << (pass ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) out << ": " << detail;
    out << "\n";
  };

  std::string structural, reality;
  for (const auto& v : model::violations(nf)) {
    if (v.field == "F[1]" && v.message.find("real") != std::string::npos) {
      reality = v.message;
      continue;
    }
    structural += (structural.empty() ? "" : "; ") + v.field + " " + v.message;
  }
  line("normal-form invariants", structural.empty(), structural);

  const int m = std::max(1, lattice::alpha_cap(cfg.kmax, cfg.C_alpha));
  const auto res = birkhoff::non_resonance_check(nf.mu, 2 * m);
  line(fmt::format("non-resonance (|k| <= {})", 2 * m), !res.has_value(),
       res ? "mu . k = 0 for k = (" + join(*res, ", ") + ")" : "");

  const auto dio = birkhoff::diophantine_check(nf.mu, m, cfg.dioph_D, cfg.dioph_C);
  std::string detail = fmt::format("min |mu.(alpha - beta)| = {:.6g}, bound e^(-D m)/C = {:.6g} (m = {})",
                                   dio.min_gap, dio.bound, m);
  if (!dio.pass && !dio.alpha.empty()) detail += ", witness alpha - beta = (" + join(witness(dio.alpha, dio.beta), ", ") + ")";
  line("Diophantine", dio.pass, detail);

  line("F_1(0) real", reality.empty(), reality);

  const auto w = window_of(cfg);
  const long long kmin = static_cast<long long>(std::ceil(w.B * nf.d / std::numbers::pi));
  std::string wdetail;
  if (!(w.A > 0.0) || !(w.B > 0.0)) wdetail = "A and B must be positive";
  else if (cfg.kmax < kmin) wdetail = fmt::format("kmax = {} is below ceil(B d / pi) = {}", cfg.kmax, kmin);
  else if (!w.contains(model::pseudopole(cfg.kmax, model::MultiIndex(nf.n, 0), nf.d, nf.mu)))
    wdetail = "the alpha = 0 pseudopole at kmax lies outside the window";
  line(fmt::format("window (A = {:.6g}, B = {:.6g}, kmax = {})", w.A, w.B, cfg.kmax), wdetail.empty(), wdetail);
  return all ? kOk : kCheckFailed;
}

void add_format(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--format", cfg.format, "Output format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::Csv}, {"json", Format::Json}}));
  cmd->add_option("-o,--output", cfg.output, "Output path (default: stdout)");
}

void add_lattice_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--window", cfg.window, "Window constants A B: Im lambda < A ln Re lambda, Re lambda > B")
      ->expected(2);
  cmd->add_option("--kmax", cfg.kmax, "Largest k")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha-log-const", cfg.C_alpha, "C_alpha in |alpha| <= C_alpha ln k")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resonance strings for two convex obstacles"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* geo = app.add_subcommand("geometry", "Trapped ray, Poincare map, germ and escape partition");
  geo->add_option("obstacles", cfg.input, "Obstacle file (.json or .toml)")->required();
  geo->add_option("--order", cfg.order, "Normal-form order r (germ degree 2r - 1)")->check(CLI::Range(1, 4));
  geo->add_option("--escape-grid", cfg.escape_grid, "Escape partition on an N x N grid")->check(CLI::PositiveNumber);
  geo->add_option("--escape-cap", cfg.escape_cap, "Iteration cap for escape counts")->check(CLI::NonNegativeNumber);
  geo->add_option("--escape-out", cfg.escape_out, "Escape partition CSV path");
  geo->add_option("--emit-nf", cfg.emit_nf, "Write the normal-form file for the strings subcommand");
  geo->add_option("--overlay", cfg.overlay, "F_j (j >= 1) overlay for --emit-nf");
  add_format(geo, cfg);

  auto* str = app.add_subcommand("strings", "String coefficients and the resonance lattice");
  str->add_option("normal_form", cfg.input, "Normal-form file")->required();
  str->add_option("--order", cfg.order, "Expansion order r (default: the file's r)")->check(CLI::PositiveNumber);
  add_lattice_flags(str, cfg);
  str->add_flag("--oracle", cfg.oracle, "Attach Newton roots of the model equation");
  str->add_option("--tol-newton", cfg.tol_newton, "Newton stopping rule |g| < tol k")->check(CLI::PositiveNumber);
  str->add_option("--tol-cluster", cfg.tol_cluster, "Relative tolerance for clustering")->check(CLI::NonNegativeNumber);
  str->add_option("--svg", cfg.svg, "Write a lattice scatter plot");
  str->add_option("--coeffs", cfg.coeffs, "Write the string coefficients a_0..a_{r+1}");
  add_format(str, cfg);

  auto* chk = app.add_subcommand("check", "Non-resonance, Diophantine, F_1(0) reality and window checks");
  chk->add_option("normal_form", cfg.input, "Normal-form file")->required();
  add_lattice_flags(chk, cfg);
  chk->add_option("--dioph-D", cfg.dioph_D, "Diophantine constant D")->check(CLI::PositiveNumber);
  chk->add_option("--dioph-C", cfg.dioph_C, "Diophantine constant C")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (geo->parsed()) return cmd_geometry(cfg, out, err);
    if (str->parsed()) return cmd_strings(cfg, out, err);
    return cmd_check(cfg, out, err);
  } catch (const HyperbolicityError& e) {
    err << "error: hyperbolicity violated: " << e.what() << "\n";
    return kNotHyperbolic;
  } catch (const GermFitError& e) {
    err << "error: germ extraction failed: " << e.what() << "\n";
    return kFitFailure;
  } catch (const SolverError& e) {
    err << "error: normal form failed: " << e.what() << "\n";
    return kFitFailure;
  } catch (const NearResonanceError& e) {
    err << "error: normal form failed: " << e.what() << "\n";
    return kFitFailure;
  } catch (const ValidationError& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return kBadInput;
  } catch (const GeometryError& e) {
    err << "error: invalid obstacles: " << e.what() << "\n";
    return kBadInput;
  } catch (const DimensionError& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace resforge::cli
