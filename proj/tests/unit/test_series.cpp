#include <cmath>
#include <random>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "resforge/errors.hpp"
#include "resforge/series/formal_series.hpp"
#include "resforge/series/map_germ.hpp"
#include "resforge/series/univariate.hpp"

using namespace resforge;
using namespace resforge::series;

namespace {

FormalSeries var(int nv, Truncation t, int i) { return FormalSeries::variable(nv, t, i); }

FormalSeries random_series(std::mt19937& rng, int nv, Truncation t, int max_deg, int nterms) {
  std::uniform_int_distribution<int> e(0, max_deg);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  FormalSeries s(nv, t);
  for (int k = 0; k < nterms; ++k) {
    std::vector<int> ex(nv);
    int left = max_deg;
    for (auto& v : ex) {
      v = std::min(left, e(rng) % 3);
      left -= v;
    }
    s += FormalSeries::monomial(nv, t, ex, {c(rng), c(rng)});
  }
  return s;
}

}  // namespace

TEST(FormalSeries, AddCancelsAndKeepsIdentity) {
  auto t = Truncation::degree(4);
  auto x = var(1, t, 0);
  auto a = (1.0 + x) + (1.0 - x);
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(a.constant_term(), Complex(2.0));
  auto p = x * x + 3.0 * x;
  EXPECT_EQ(max_abs_difference(p + FormalSeries(1, t), p), 0.0);
}

TEST(FormalSeries, AddRespectsDegreeCap) {
  auto t1 = Truncation::degree(1);
  auto x2 = FormalSeries::monomial(1, t1, std::vector<int>{2}, 1.0);
  EXPECT_TRUE((x2 + x2).is_zero());
}

TEST(FormalSeries, MulBinomialAndUnit) {
  auto t = Truncation::degree(2);
  auto x = var(1, t, 0);
  auto sq = (1.0 + x) * (1.0 + x);
  EXPECT_EQ(sq.coeff(std::vector<int>{0}), Complex(1.0));
  EXPECT_EQ(sq.coeff(std::vector<int>{1}), Complex(2.0));
  EXPECT_EQ(sq.coeff(std::vector<int>{2}), Complex(1.0));
  EXPECT_EQ(sq.size(), 3u);
  auto one = FormalSeries::constant(1, t, 1.0);
  EXPECT_EQ(max_abs_difference(sq * one, sq), 0.0);
}

TEST(FormalSeries, TwoGradedTruncationDropsQuartic) {
  auto t = Truncation::two_graded(1);
  auto xxi = var(2, t, 0) * var(2, t, 1);
  EXPECT_EQ(xxi.size(), 1u);
  EXPECT_TRUE((xxi * xxi).is_zero());
  auto t2 = Truncation::two_graded(2);
  auto q = var(2, t2, 0) * var(2, t2, 1);
  EXPECT_EQ((q * q).size(), 1u);
  // h^1 terms keep phase degree <= 2(r-1).
  FormalSeries h(2, t2);
  h.add_term(Monomial().with_hpow(1), 1.0);
  EXPECT_EQ((h * q).size(), 1u);
  EXPECT_TRUE((h * q * q).is_zero());
}

TEST(FormalSeries, MismatchedVariableCountThrows) {
  auto t = Truncation::degree(3);
  EXPECT_THROW(var(1, t, 0) + var(2, t, 0), DimensionError);
  EXPECT_THROW(var(1, t, 0) * var(2, t, 1), DimensionError);
  EXPECT_THROW(var(2, t, 0) + FormalSeries(2, Truncation::two_graded(1)), DimensionError);
}

TEST(Poisson, Anchors) {
  auto t = Truncation::degree(6);
  auto x = var(2, t, 0), xi = var(2, t, 1);
  auto res = poisson(x * xi, 0.5 * (x * x - xi * xi));
  EXPECT_LT(max_abs_difference(res, x * x + xi * xi), 1e-15);
  EXPECT_EQ(poisson(x, xi).constant_term(), Complex(-1.0));
  EXPECT_EQ(poisson(x, xi).size(), 1u);
  auto a = x * x * xi + 2.0 * xi * xi;
  EXPECT_TRUE(poisson(a, a).is_zero());
  EXPECT_THROW(poisson(var(3, t, 0), var(3, t, 1)), DimensionError);
}

TEST(Poisson, JacobiIdentityRandom) {
  std::mt19937 rng(7);
  auto t = Truncation::degree(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_series(rng, 4, t, 3, 5);
    auto b = random_series(rng, 4, t, 3, 5);
    auto c = random_series(rng, 4, t, 3, 5);
    auto j = poisson(a, poisson(b, c)) + poisson(b, poisson(c, a)) + poisson(c, poisson(a, b));
    EXPECT_LT(j.max_abs(), 1e-12);
  }
}

TEST(FormalSeries, RingLawsRandom) {
  std::mt19937 rng(11);
  auto t = Truncation::degree(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_series(rng, 3, t, 3, 6);
    auto b = random_series(rng, 3, t, 3, 6);
    auto c = random_series(rng, 3, t, 3, 6);
    EXPECT_LT(max_abs_difference(a * b, b * a), 1e-13);
    EXPECT_LT(max_abs_difference((a * b) * c, a * (b * c)), 1e-12);
    EXPECT_LT(max_abs_difference(a * (b + c), a * b + a * c), 1e-12);
  }
}

TEST(FormalSeries, ElementaryFunctions) {
  auto t = Truncation::degree(8);
  auto x = var(2, t, 0), y = var(2, t, 1);
  auto s = 0.3 + x + 0.5 * x * y;
  auto one = sin(s) * sin(s) + cos(s) * cos(s);
  EXPECT_LT(max_abs_difference(one, FormalSeries::constant(2, t, 1.0)), 1e-14);
  auto r = sqrt(2.0 + s);
  EXPECT_LT(max_abs_difference(r * r, 2.0 + s), 1e-14);
  EXPECT_LT(max_abs_difference(reciprocal(s) * s, FormalSeries::constant(2, t, 1.0)), 1e-12);
  EXPECT_THROW(reciprocal(x), DimensionError);
}

TEST(FormalSeries, ComposeMatchesEvaluation) {
  auto t = Truncation::degree(6);
  auto x = var(2, t, 0), y = var(2, t, 1);
  auto f = x * x * y + 2.0 * y + x;
  std::vector<FormalSeries> subs{x + y * y, 0.5 * x - y};
  auto g = compose(f, subs);
  std::vector<Complex> p{0.1, -0.2};
  std::vector<Complex> q{subs[0].evaluate(p), subs[1].evaluate(p)};
  EXPECT_NEAR(std::abs(g.evaluate(p) - f.evaluate(q)), 0.0, 1e-15);
}

TEST(FormalSeries, JsonRoundTripIsBitExact) {
  std::mt19937 rng(3);
  auto t = Truncation::degree(63, 63);
  auto a = random_series(rng, 4, t, 5, 12);
  a += FormalSeries::monomial(4, t, std::vector<int>{1, 0, 0, 2}, {1.0 / 3.0, -std::exp(1.0)}, 2);
  auto b = from_json(nlohmann::json::parse(to_json(a).dump()), t);
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [m, c] : a.terms()) {
    EXPECT_EQ(c.real(), b.coeff(m).real());
    EXPECT_EQ(c.imag(), b.coeff(m).imag());
  }
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"nvars":2,"terms":[{"exp":[1],"re":1}]})")), ValidationError);
}

TEST(FlowMap, LinearFlowIsExact) {
  const double mu = 0.7;
  auto t = Truncation::degree(8);
  HamiltonianGerm p(mu * var(2, t, 0) * var(2, t, 1));
  auto g = hamiltonian_flow_map(p, 8);
  EXPECT_EQ(g.component(0).size(), 1u);
  EXPECT_NEAR(g.component(0).coeff(std::vector<int>{1, 0}).real(), std::exp(mu), 1e-15);
  EXPECT_NEAR(g.component(1).coeff(std::vector<int>{0, 1}).real(), std::exp(-mu), 1e-15);
}

TEST(FlowMap, OrderOneIsLinearPart) {
  const double mu = 0.4;
  auto t = Truncation::degree(6);
  auto x = var(2, t, 0), xi = var(2, t, 1);
  HamiltonianGerm p(mu * x * xi + 0.3 * x * x * x * xi + 0.2 * xi * xi * xi);
  auto g = hamiltonian_flow_map(p, 1);
  Eigen::Matrix2d expect;
  expect << std::exp(mu), 0.0, 0.0, std::exp(-mu);
  EXPECT_LT((g.linear_part() - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(g.component(0).max_degree(), 1);
}

TEST(FlowMap, MatchesOdeIntegration) {
  const double mu = 0.8, c = 0.6;
  auto t = Truncation::degree(16);
  auto x = var(2, t, 0), xi = var(2, t, 1);
  HamiltonianGerm p(mu * x * xi + c * (x * xi) * (x * xi));
  auto g = hamiltonian_flow_map(p, 13);

  // x' = dp/dxi, xi' = -dp/dx with p = mu x xi + c (x xi)^2.
  using State = std::vector<double>;
  auto rhs = [&](const State& z, State& dz, double) {
    const double act = z[0] * z[1];
    dz[0] = mu * z[0] + 2.0 * c * act * z[0];
    dz[1] = -mu * z[1] - 2.0 * c * act * z[1];
  };
  for (double angle : {0.3, 1.1, 2.5, 4.0}) {
    State z{0.05 * std::cos(angle), 0.05 * std::sin(angle)};
    State z0 = z;
    boost::numeric::odeint::integrate_adaptive(
        boost::numeric::odeint::make_controlled<boost::numeric::odeint::runge_kutta_fehlberg78<State>>(1e-15, 1e-15),
        rhs, z, 0.0, 1.0, 1e-3);
    auto img = g.evaluate_real(z0);
    EXPECT_NEAR(img[0], z[0], 1e-9);
    EXPECT_NEAR(img[1], z[1], 1e-9);
  }
}

TEST(FlowMap, SymplecticToTruncationOrder) {
  auto t = Truncation::degree(8);
  std::vector<FormalSeries> v;
  for (int i = 0; i < 4; ++i) v.push_back(var(4, t, i));
  auto p = std::log(2.0) * v[0] * v[2] + std::log(3.0) * v[1] * v[3] + 0.3 * v[0] * v[0] * v[3] +
           0.2 * v[1] * v[2] * v[2] * v[0] - 0.1 * v[3] * v[3] * v[3];
  auto g = hamiltonian_flow_map(HamiltonianGerm(p), 6);
  auto lin = g.linear_part();
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
  omega.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
  EXPECT_LT((lin.transpose() * omega * lin - omega).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(g.symplectic_defect(), 1e-12);
}

TEST(HamiltonianGerm, RejectsBadQuadraticPart) {
  auto t = Truncation::degree(4);
  auto x = var(2, t, 0), xi = var(2, t, 1);
  EXPECT_THROW(HamiltonianGerm(x * x + xi * x), ValidationError);
  EXPECT_THROW(HamiltonianGerm(-1.0 * x * xi), ValidationError);
  EXPECT_THROW(HamiltonianGerm(x * xi + x), ValidationError);
}

TEST(Univariate, ReciprocalAndPowers) {
  Univariate<double> a(6);
  a[0] = 2.0;
  a[1] = 1.0;
  a[3] = -0.5;
  auto r = a * a.reciprocal();
  EXPECT_NEAR(r[0], 1.0, 1e-15);
  for (std::size_t i = 1; i <= 6; ++i) EXPECT_NEAR(r[i], 0.0, 1e-15);
  auto p = a.pow(3);
  auto q = a * a * a;
  for (std::size_t i = 0; i <= 6; ++i) EXPECT_NEAR(p[i], q[i], 1e-13);
  auto m = a.pow(-2) * a * a;
  EXPECT_NEAR(m[0], 1.0, 1e-15);
  EXPECT_NEAR(m[4], 0.0, 1e-14);
}
