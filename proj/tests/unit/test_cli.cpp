#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "resforge/cli/cli.hpp"
#include "resforge/errors.hpp"

namespace fs = std::filesystem;
using namespace resforge;

namespace {

const fs::path kData = RESFORGE_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return (kData / name).string(); }

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "resforge_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, sep);) out.push_back(f);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

TEST(Geometry, TwoCirclesJsonAndToml) {
  for (const char* file : {"two_circles.json", "two_circles.toml"}) {
    auto r = run({"geometry", data(file)});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("d = 2.000000000\n"), std::string::npos) << r.out;
    // (3 + sqrt 8)^2
    EXPECT_NE(r.out.find("nu = 33.97056275\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("det Dkappa = 1.000000000\n"), std::string::npos);
  }
}

TEST(Geometry, JsonReport) {
  auto r = run({"geometry", data("two_circles.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("d").get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(j.at("nu").get<double>(), 17.0 + 12.0 * std::sqrt(2.0), 1e-9);
}

TEST(Geometry, MalformedJsonReportsPosition) {
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{\"obstacles\": [\n  {\"curve\": \"circle\",, }\n]}\n";
  auto r = run({"geometry", bad.string()});
  EXPECT_EQ(r.code, cli::kBadInput);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("column"), std::string::npos) << r.err;
}

TEST(Geometry, MalformedToml) {
  const auto bad = scratch("bad.toml");
  std::ofstream(bad) << "[[obstacles]]\ncurve = \"circle\"\nradius = = 1\n";
  auto r = run({"geometry", bad.string()});
  EXPECT_EQ(r.code, cli::kBadInput);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Geometry, NotHyperbolicOrBadObstacle) {
  const auto overlap = scratch("overlap.json");
  std::ofstream(overlap) << R"({"obstacles":[{"curve":"circle","center":[0,0],"radius":1},)"
                            R"({"curve":"circle","center":[1.5,0],"radius":1}]})";
  EXPECT_EQ(run({"geometry", overlap.string()}).code, cli::kBadInput);
  EXPECT_EQ(run({"geometry", scratch("missing.json").string()}).code, cli::kBadInput);
}

TEST(Geometry, EscapeGridCsv) {
  const auto csv = scratch("escape.csv");
  auto r = run({"geometry", data("two_circles.json"), "--escape-grid", "200", "--escape-out", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(slurp(csv));
  ASSERT_EQ(ls.size(), 200u * 200u + 1u);
  EXPECT_EQ(ls.front(), "s,xi,jplus,jminus,glancing");
  bool trapped = false;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = split(ls[i], ',');
    ASSERT_EQ(f.size(), 5u) << ls[i];
    if (f[2] == "inf") trapped = true;
  }
  // The grid contains the fixed point (s, xi) = (0, 0) only approximately;
  // no cell sits exactly on the trapped set.
  EXPECT_FALSE(trapped);
}

TEST(Geometry, EmitNormalFormWithoutOverlay) {
  const auto nf = scratch("emitted.json");
  auto r = run({"geometry", data("two_circles.json"), "--emit-nf", nf.string(), "--order", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("notice:"), std::string::npos);
  EXPECT_NE(r.err.find("--overlay"), std::string::npos);
  auto j = nlohmann::json::parse(slurp(nf));
  EXPECT_EQ(j.at("n").get<int>(), 1);
  EXPECT_EQ(j.at("r").get<int>(), 2);
  EXPECT_NEAR(j.at("d").get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(j.at("mu")[0].get<double>(), std::log(17.0 + 12.0 * std::sqrt(2.0)), 1e-9);
  // The emitted file feeds straight into strings.
  auto s = run({"strings", nf.string(), "--window", "1", "1", "--kmax", "30"});
  EXPECT_EQ(s.code, 0) << s.err;
}

TEST(Geometry, EmitNormalFormWithOverlay) {
  const auto overlay = scratch("overlay.json");
  std::ofstream(overlay) << R"({"F":[{"j":1,"terms":[{"iexp":[0],"re":0.25}]}]})";
  const auto nf = scratch("emitted_overlay.json");
  auto r = run({"geometry", data("two_circles.json"), "--emit-nf", nf.string(), "--overlay", overlay.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.find("notice:"), std::string::npos);
  auto j = nlohmann::json::parse(slurp(nf));
  bool found = false;
  for (const auto& block : j.at("F")) {
    if (block.at("j").get<int>() != 1) continue;
    for (const auto& t : block.at("terms")) {
      if (t.at("iexp")[0].get<int>() == 0) found = std::abs(t.at("re").get<double>() - 0.25) < 1e-15;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Strings, LinearModelResiduals) {
  auto r = run({"strings", data("linear_nf.json"), "--window", "1", "10", "--kmax", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_GT(ls.size(), 1u);
  EXPECT_EQ(ls.front(), "alpha,k,re_series,im_series,re_oracle,im_oracle,residual,cluster_id");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = split(ls[i], ',');
    ASSERT_EQ(f.size(), 8u);
    const double k = std::stod(f[1]);
    EXPECT_GT(k, 10.0);
    EXPECT_LT(std::stod(f[6]), 1e-12 * k) << ls[i];
  }
}

TEST(Strings, OracleColumnsAndRatio) {
  auto r = run({"strings", data("generic_nf.json"), "--window", "1", "2", "--kmax", "60", "--oracle"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(r.out);
  EXPECT_EQ(ls.front(), "alpha,k,re_series,im_series,re_oracle,im_oracle,residual,cluster_id,ratio");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = split(ls[i], ',');
    ASSERT_EQ(f.size(), 9u);
    EXPECT_FALSE(f[4].empty());
    EXPECT_TRUE(std::isfinite(std::stod(f[8])));
  }
}

TEST(Strings, JsonRoundTripMatchesCsv) {
  auto js = run({"strings", data("generic_nf.json"), "--window", "1", "2", "--kmax", "40", "--format", "json"});
  auto csv = run({"strings", data("generic_nf.json"), "--window", "1", "2", "--kmax", "40"});
  ASSERT_EQ(js.code, 0);
  auto recs = lattice::records_from_json(nlohmann::json::parse(js.out));
  std::ostringstream again;
  lattice::write_csv(again, recs);
  EXPECT_EQ(again.str(), csv.out);
}

TEST(Strings, RepeatedRunsAreByteIdentical) {
  const std::vector<std::string> args = {"strings", data("generic_nf.json"), "--window", "1", "2",
                                         "--kmax", "80", "--oracle"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Strings, SvgAndCoefficients) {
  const auto svg = scratch("lattice.svg");
  const auto coeffs = scratch("coeffs.csv");
  auto r = run({"strings", data("generic_nf.json"), "--window", "1", "2", "--kmax", "40", "--svg", svg.string(),
                "--coeffs", coeffs.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(svg);
  EXPECT_EQ(text.rfind("<svg", 0), 0u);
  EXPECT_NE(text.find("</svg>"), std::string::npos);
  EXPECT_NE(text.find("<circle"), std::string::npos);
  auto ls = lines(slurp(coeffs));
  ASSERT_FALSE(ls.empty());
  EXPECT_EQ(ls.front(), "alpha,j,re,im");
}

TEST(Strings, RejectsBadInput) {
  EXPECT_EQ(run({"strings", data("generic_nf.json"), "--kmax", "0"}).code, cli::kBadInput);
  EXPECT_EQ(run({"strings", data("generic_nf.json"), "--window", "-1", "2"}).code, cli::kBadInput);
  EXPECT_EQ(run({"strings"}).code, cli::kBadInput);
  EXPECT_EQ(run({"bogus"}).code, cli::kBadInput);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST(Check, GenericFormPasses) {
  auto r = run({"check", data("generic_nf.json"), "--window", "1", "2"});
  EXPECT_EQ(r.code, 0) << r.out;
  for (const auto& l : lines(r.out)) EXPECT_EQ(l.rfind("PASS", 0), 0u) << l;
}

TEST(Check, ResonantMuFailsWithWitness) {
  auto j = nlohmann::json::parse(slurp(data("generic_nf.json")));
  j["mu"] = {1.0, 1.0};
  const auto p = scratch("resonant.json");
  std::ofstream(p) << j.dump();
  auto r = run({"check", p.string()});
  EXPECT_EQ(r.code, cli::kCheckFailed);
  EXPECT_NE(r.out.find("FAIL Diophantine"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("witness alpha - beta = (1, -1)"), std::string::npos) << r.out;
}

TEST(Check, ComplexLeadingCorrectionFails) {
  auto j = nlohmann::json::parse(slurp(data("generic_nf.json")));
  for (auto& block : j["F"]) {
    if (block["j"] == 1) block["terms"][0]["im"] = 0.1;
  }
  const auto p = scratch("complex_f1.json");
  std::ofstream(p) << j.dump();
  auto r = run({"check", p.string()});
  EXPECT_EQ(r.code, cli::kCheckFailed);
  EXPECT_NE(r.out.find("FAIL F_1(0) real"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS Diophantine"), std::string::npos) << r.out;
}

TEST(Svg, EmptyRecordsStillRender) {
  const auto s = cli::render_svg({}, {400, 300, "empty"});
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_NE(s.find("empty"), std::string::npos);
}

TEST(Io, TomlToJson) {
  auto j = cli::parse_toml("n = 1\nd = 2.5\nmu = [0.5]\n[[F]]\nj = 0\n");
  EXPECT_EQ(j.at("n").get<int>(), 1);
  EXPECT_DOUBLE_EQ(j.at("d").get<double>(), 2.5);
  EXPECT_EQ(j.at("F")[0].at("j").get<int>(), 0);
  EXPECT_THROW(cli::parse_toml("x = [1,\n"), ValidationError);
}
