#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "resforge/errors.hpp"
#include "resforge/model/normal_form.hpp"
#include "resforge/model/solver.hpp"

using namespace resforge;
using namespace resforge::model;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

NormalFormData generic_fixture() {
  auto nf = NormalFormData::linear(pi, {1.0}, 3);
  nf.add(0, {2}, 0.3);
  nf.add(0, {3}, 0.05);
  nf.add(1, {0}, 0.2);
  nf.add(1, {1}, 0.1);
  nf.add(2, {0}, 0.07);
  return nf;
}

NormalFormData two_dim_fixture() {
  auto nf = NormalFormData::linear(2.0, {std::log(2.0), std::log(3.0)}, 3);
  nf.add(0, {1, 1}, 0.2);
  nf.add(0, {2, 0}, -0.1);
  nf.add(0, {0, 3}, 0.03);
  nf.add(1, {0, 0}, 0.15);
  nf.add(1, {1, 0}, 0.05);
  nf.add(1, {0, 2}, {0.02, 0.01});
  nf.add(2, {0, 1}, 0.04);
  nf.add(3, {0, 0}, -0.02);
  return nf;
}

}  // namespace

TEST(Pseudopole, ClosedForm) {
  auto l = pseudopole(3, {0}, pi, {1.0});
  EXPECT_NEAR(l.real(), 3.0, 1e-15);
  EXPECT_NEAR(l.imag(), 1.0 / (4.0 * pi), 1e-16);
  EXPECT_NEAR(pseudopole(5, {0}, 2.0, {1e-300}).imag(), 0.0, 1e-300);
  EXPECT_LT(pseudopole(5, {0, 1}, 2.0, {0.5, 0.7}).imag(), pseudopole(5, {0, 2}, 2.0, {0.5, 0.7}).imag());
  EXPECT_LT(pseudopole(5, {0, 1}, 2.0, {0.5, 0.7}).imag(), pseudopole(5, {1, 1}, 2.0, {0.5, 0.7}).imag());
}

TEST(Validation, NamesTheViolatedField) {
  auto nf = NormalFormData::linear(1.0, {1.0}, 2);
  nf.add(1, {0}, {0.0, 0.1});
  try {
    validate(nf);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "F[1]");
  }
  auto deg = NormalFormData::linear(1.0, {1.0}, 2);
  deg.F[1] = FormalSeries(1, series::Truncation::degree(8));
  deg.add(1, {2}, 1.0);
  ASSERT_FALSE(violations(deg).empty());
  EXPECT_EQ(violations(deg).front().field, "F[1]");
  auto lin = NormalFormData::linear(1.0, {1.0}, 2);
  lin.add(0, {1}, 0.5);
  ASSERT_FALSE(violations(lin).empty());
  EXPECT_EQ(violations(lin).front().field, "F[0]");
  EXPECT_FALSE(violations(NormalFormData::linear(1.0, {-1.0}, 2)).empty());
}

TEST(NormalFormJson, RoundTripAndImplicitLinearPart) {
  auto nf = two_dim_fixture();
  auto back = nf_from_json(nf_to_json(nf));
  for (int j = 0; j <= nf.r; ++j) EXPECT_EQ(series::max_abs_difference(nf.F[j], back.F[j]), 0.0);
  auto doc = nlohmann::json::parse(R"({"n":1,"d":2.0,"r":2,"mu":[0.5],"F":[{"j":0,"terms":[{"iexp":[2],"re":0.3}]}]})");
  auto parsed = nf_from_json(doc);
  EXPECT_EQ(parsed.F[0].coeff(std::vector<int>{1}), Complex(0.5));
  EXPECT_EQ(parsed.F[0].coeff(std::vector<int>{2}), Complex(0.3));
  auto bad = nlohmann::json::parse(R"({"n":1,"d":2.0,"r":2,"mu":[0.5],"F":[{"j":1,"terms":[{"iexp":[0],"re":0.3,"im":0.1}]}]})");
  EXPECT_THROW(nf_from_json(bad), ValidationError);
  EXPECT_NO_THROW(nf_from_json(bad, false));
}

TEST(Decompose, SecondOrderPolynomial) {
  const double c = 0.4, b = -0.3;
  auto nf = NormalFormData::linear(1.0, {0.9}, 2);
  nf.add(0, {2}, c);
  nf.add(1, {0}, 0.25);
  nf.add(1, {1}, b);
  auto df = decompose(nf);
  auto f2 = df.f(2);
  EXPECT_EQ(f2.coeff(std::vector<int>{1}), Complex(b));
  EXPECT_EQ(f2.coeff(std::vector<int>{2}), Complex(c));
  EXPECT_EQ(f2.size(), 2u);
  EXPECT_EQ(df.F1_0, Complex(0.25));
}

TEST(Decompose, NothingToExpand) {
  auto nf = NormalFormData::linear(1.0, {0.9}, 3);
  nf.add(2, {0}, 0.3);
  nf.add(3, {0}, -0.1);
  auto df = decompose(nf);
  for (int m = 2; m <= 3; ++m) EXPECT_TRUE(df.f(m).is_zero());
  EXPECT_EQ(df.q(2, {4}), Complex(0.3));
  EXPECT_EQ(df.q(3, {4}), Complex(-0.1));
}

TEST(Decompose, CubicReadOff) {
  auto nf = NormalFormData::linear(1.0, {0.9}, 3);
  nf.add(0, {3}, 0.7);
  auto df = decompose(nf);
  EXPECT_TRUE(df.h[2].is_zero());
  EXPECT_EQ(df.h[3].coeff(std::vector<int>{3}), Complex(0.7));
  EXPECT_EQ(df.h[3].size(), 1u);
}

TEST(EvalF, LinearCase) {
  auto nf = NormalFormData::linear(2.0, {0.8}, 2);
  Complex lambda(40.0, 0.3);
  for (int a : {0, 1, 3}) {
    auto v = eval_F(nf, {a}, lambda);
    EXPECT_LT(rel(lambda * v.value, 0.8 * (2.0 * a + 1.0) / (2.0 * I)), 1e-15);
    EXPECT_FALSE(v.outside_regime);
  }
  EXPECT_TRUE(eval_F(nf, {20}, Complex(40.0, 0.0)).outside_regime);
}

TEST(EvalF, TwoRoutesAgree) {
  for (const auto& nf : {generic_fixture(), two_dim_fixture()}) {
    auto df = decompose(nf);
    for (double re : {30.0, 300.0, 3000.0}) {
      for (MultiIndex a : {MultiIndex(nf.n, 0), MultiIndex(nf.n, 2)}) {
        Complex lambda(re, 0.7);
        EXPECT_LT(rel(eval_F_decomposed(df, a, lambda), eval_F(nf, a, lambda).value), 1e-12);
        EXPECT_LT(rel(K_alpha(df, a, lambda), std::exp(-I * lambda * eval_F(nf, a, lambda).value)), 1e-12);
      }
    }
  }
}

TEST(EvalF, PaddingOrderChangesNothing) {
  auto nf = generic_fixture();
  auto padded = NormalFormData::linear(nf.d, nf.mu, 5);
  for (int j = 0; j <= 3; ++j) padded.F[j] = nf.F[j].with_truncation(series::Truncation::degree(5));
  Complex lambda(50.0, 0.2);
  EXPECT_EQ(eval_F(nf, {1}, lambda).value, eval_F(padded, {1}, lambda).value);
}

TEST(KAlpha, ModulusAndCaseA) {
  auto nf = NormalFormData::linear(1.3, {1.0}, 1);
  EXPECT_LT(rel(K_alpha(nf, {0}, Complex(25.0, 0.0)), Complex(std::exp(-0.5))), 1e-15);
  auto nf2 = NormalFormData::linear(1.3, {0.7, 0.4}, 1);
  for (long long k : {3LL, 40LL, 1000LL}) {
    MultiIndex a{2, 1};
    Complex l = pseudopole(k, a, nf2.d, nf2.mu);
    EXPECT_LT(std::abs(1.0 - std::exp(-2.0 * I * nf2.d * l) * K_alpha(nf2, a, l)), 1e-12);
  }
}

TEST(SolveString, CaseAIsPseudopole) {
  auto nf = NormalFormData::linear(2.5, {0.3, 0.9, 1.4}, 4);
  auto df = decompose(nf);
  MultiIndex a{3, 0, 7};
  auto s = solve_string(df, a, nf.d, 4);
  ASSERT_EQ(s.a.size(), 6u);
  for (int j = 2; j <= 5; ++j) EXPECT_EQ(s.a[j], Complex(0.0));
  for (long long k : {1LL, 17LL, 1000000LL}) EXPECT_LT(rel(s.evaluate(k), pseudopole(k, a, nf.d, nf.mu)), 1e-15);
}

TEST(SolveString, FirstCoefficient) {
  auto nf = generic_fixture();
  auto s = solve_string(decompose(nf), {2}, nf.d, 3);
  Complex a1 = -(1.0 / (4.0 * I * nf.d)) * 1.0 * 5.0 - 0.2 / (2.0 * nf.d);
  EXPECT_LT(rel(s.a[1], a1), 1e-15);
  EXPECT_NEAR(s.a[0].real(), pi / nf.d, 1e-15);
}

TEST(SolveString, CaseBClosedForms) {
  for (double d : {pi, 2.0, 0.7}) {
    for (double c3 : {0.0, 0.35}) {
      auto nf = NormalFormData::linear(d, {1.0}, 3);
      nf.add(0, {2}, 1.0);
      nf.add(0, {3}, c3);
      auto df = decompose(nf);
      for (int al : {0, 1, 4}) {
        auto s = solve_string(df, {al}, d, 3);
        Complex y = (2.0 * al + 1.0) / (2.0 * I);
        Complex h2 = y * y, h3 = c3 * y * y * y;
        EXPECT_LT(rel(s.a[2], -h2 / (2.0 * pi)), 1e-12);
        EXPECT_LT(rel(s.a[2], Complex((2.0 * al + 1.0) * (2.0 * al + 1.0) / (8.0 * pi))), 1e-12);
        // Third coefficient; the h3 weight reduces to 1/pi^2 only at d = 2.
        Complex a3 = -(d / pi) * s.a[1] * s.a[2] - d * h3 / (2.0 * pi * pi);
        EXPECT_LT(rel(s.a[3], a3), 1e-12);
      }
    }
  }
}

TEST(SolveString, ResidualScalesWithOrder) {
  // The residual of the order-r value must fall like k^{-(r+1)}; any wrong
  // coefficient a_j (j <= r+1) would leave a k^{1-j} term behind.
  for (const auto& nf : {generic_fixture(), two_dim_fixture()}) {
    for (int r = 1; r <= 3; ++r) {
      MultiIndex a(nf.n, 1);
      double r4 = residual_certificate(nf, a, 10000, r);
      double r5 = residual_certificate(nf, a, 100000, r);
      EXPECT_NEAR(std::log10(r4 / r5), r + 1.0, 0.01) << "r = " << r;
    }
  }
}

TEST(SolveString, CaseAResidualVanishes) {
  auto nf = NormalFormData::linear(1.7, {0.6, 1.1}, 2);
  for (long long k : {10LL, 1000000LL}) EXPECT_LT(residual_certificate(nf, {1, 3}, k, 2), 1e-30 * k);
}

TEST(SolveString, CoefficientsStableInOrder) {
  auto nf = two_dim_fixture();
  auto df = decompose(nf);
  for (int r = 1; r <= 3; ++r) {
    auto lo = solve_string(df, {1, 2}, nf.d, r);
    auto hi = solve_string(df, {1, 2}, nf.d, r + 2);
    for (int j = 0; j <= r + 1; ++j) EXPECT_LT(std::abs(lo.a[j] - hi.a[j]), 1e-12 * std::max(1.0, std::abs(hi.a[j])));
  }
}

TEST(SolveString, PolynomialInAlpha) {
  auto nf = generic_fixture();
  auto df = decompose(nf);
  for (int j = 1; j <= 4; ++j) {
    // Lagrange interpolation through alpha = 0..j, checked at a held-out alpha.
    std::vector<Complex> vals;
    for (int al = 0; al <= j + 2; ++al) vals.push_back(solve_string(df, {al}, nf.d, 3).a[j]);
    for (int held = j + 1; held <= j + 2; ++held) {
      Complex interp;
      for (int p = 0; p <= j; ++p) {
        double w = 1.0;
        for (int q = 0; q <= j; ++q) {
          if (q != p) w *= static_cast<double>(held - q) / (p - q);
        }
        interp += w * vals[p];
      }
      EXPECT_LT(std::abs(interp - vals[held]), 1e-9 * std::abs(vals[held])) << "j = " << j;
    }
  }
}

TEST(Newton, CaseAConvergesImmediately) {
  auto nf = NormalFormData::linear(2.0, {0.5}, 2);
  for (long long k : {5LL, 5000LL}) {
    auto res = newton_root(nf, {2}, k, pseudopole(k, {2}, nf.d, nf.mu));
    EXPECT_LE(res.iterations, 1);
    EXPECT_LT(res.residual, 1e-12 * k);
  }
}

TEST(Newton, DerivativeMatchesFiniteDifference) {
  auto nf = two_dim_fixture();
  Complex l(60.0, 0.4);
  const double h = 1e-4;
  Complex fd = (model_equation(nf, {1, 0}, 20, l + h) - model_equation(nf, {1, 0}, 20, l - h)) / (2.0 * h);
  Complex fdi = (model_equation(nf, {1, 0}, 20, l + I * h) - model_equation(nf, {1, 0}, 20, l - I * h)) / (2.0 * I * h);
  Complex an = model_equation_derivative(nf, {1, 0}, l);
  EXPECT_LT(std::abs(fd - an), 1e-8);
  EXPECT_LT(std::abs(fdi - an), 1e-8);
}

TEST(Newton, AgreesWithSeriesAndStaysInUpperHalfPlane) {
  auto nf = generic_fixture();
  auto df = decompose(nf);
  for (int al = 0; al <= 3; ++al) {
    auto s = solve_string(df, {al}, nf.d, 3);
    const long long k = 10000;
    auto res = newton_root(nf, {al}, k, pseudopole(k, {al}, nf.d, nf.mu));
    EXPECT_LT(res.residual, 1e-12 * k);
    EXPECT_GT(res.lambda.imag(), 0.0);
    EXPECT_LT(std::abs(res.lambda - s.evaluate(k)), 1e-9);
  }
}

TEST(Newton, HighPrecisionOracleDistanceShrinks) {
  auto nf = generic_fixture();
  double prev = 1.0;
  for (long long k : {1000LL, 10000LL, 100000LL}) {
    auto c = compare_with_oracle(nf, {1}, k, 3);
    EXPECT_LE(c.iterations, 8);
    EXPECT_LT(c.distance, prev);
    prev = c.distance;
  }
}
