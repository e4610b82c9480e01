#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "semihyp/error.hpp"
#include "semihyp/spectrum.hpp"

using namespace semihyp;
using namespace semihyp::testing;

namespace {

Eigen::MatrixXcd diag(std::initializer_list<Complex> d) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d.size(), d.size());
  Eigen::Index i = 0;
  for (Complex c : d) a(i, i) = c, ++i;
  return a;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::numerical;
}

}  // namespace

TEST(AnalyzeLinearPart, Examples) {
  SpectralData s = analyze_linear_part(diag({-1.0, 2.0}));
  EXPECT_EQ(s.q, 2);
  EXPECT_EQ(s.eigenvalues[1], Complex(2.0));

  s = analyze_linear_part(diag({Complex(0, 1), 0.5, Complex(3, -4)}));
  EXPECT_EQ(s.q, 4);
  EXPECT_NEAR(std::abs(s.eigenvalues[2]), 5.0, 1e-15);

  SpectralOptions o;
  o.tol = 1e-8;
  EXPECT_EQ(code_of([&] { analyze_linear_part(diag({1.0001, 2.0}), o); }), ErrorCode::not_root_of_unity);
}

TEST(AnalyzeLinearPart, PrimitiveOrder) {
  for (int q = 1; q <= 12; ++q)
    for (int h = 1; h <= q; ++h) {
      if (std::gcd(h, q) != 1) continue;
      EXPECT_EQ(analyze_linear_part(diag({primitive_root(h, q), 3.0})).q, q);
    }
}

TEST(AnalyzeLinearPart, Errors) {
  EXPECT_EQ(code_of([] { analyze_linear_part(diag({-1.0, 1.0 + 1e-8})); }), ErrorCode::not_semi_hyperbolic);
  EXPECT_EQ(code_of([] { analyze_linear_part(diag({-1.0, 1e-9})); }), ErrorCode::not_semi_hyperbolic);
  SpectralOptions o;
  o.q_max = 5;
  EXPECT_EQ(code_of([&] { analyze_linear_part(diag({primitive_root(1, 7), 2.0}), o); }), ErrorCode::not_root_of_unity);
  Eigen::MatrixXcd a = diag({-1.0, 2.0});
  a(1, 0) = 0.5;
  EXPECT_EQ(code_of([&] { analyze_linear_part(a); }), ErrorCode::format);
  a = diag({-1.0, 2.0, 3.0});
  a(1, 2) = 1.0;  // superdiagonal 1 between different eigenvalues
  EXPECT_EQ(code_of([&] { analyze_linear_part(a); }), ErrorCode::format);
  a = diag({-1.0, 2.0});
  a(0, 1) = 1.0;
  EXPECT_EQ(code_of([&] { analyze_linear_part(a); }), ErrorCode::format);
}

TEST(AnalyzeLinearPart, JordanSuperdiagonal) {
  Eigen::MatrixXcd a = diag({Complex(0, 1), 0.5, 0.5});
  a(1, 2) = 1.0;
  SpectralData s = analyze_linear_part(a);
  ASSERT_EQ(s.superdiagonal.size(), 1u);
  EXPECT_EQ(s.superdiagonal[0], 1);
}

TEST(AnalyzeLinearPart, StableUnderSmallDiagonalPerturbation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpectralOptions o;
  for (int q = 1; q <= 8; ++q) {
    for (int rep = 0; rep < 10; ++rep) {
      Complex l1 = primitive_root(1, q) + Complex(u(rng), u(rng)) * (o.tol / 20.0);
      EXPECT_EQ(analyze_linear_part(diag({l1, 0.4}), o).q, q);
    }
  }
}

TEST(QuasiAbsence, Examples) {
  ResonanceReport r = check_quasi_absence(analyze_linear_part(diag({-1.0, 2.0})), 10, 1e-9);
  EXPECT_TRUE(r.quasi_absent);
  EXPECT_TRUE(r.witnesses.empty());

  r = check_quasi_absence(analyze_linear_part(diag({Complex(0, 1), 2.0, 0.5})), 4, 1e-9);
  EXPECT_FALSE(r.quasi_absent);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_EQ(r.witnesses[0], MultiIndex({1, 1}));

  const double th = 0.3;
  r = check_quasi_absence(
      analyze_linear_part(diag({Complex(0, 1), std::polar(2.0, th), std::polar(0.5, -th)})), 2, 1e-9);
  ASSERT_EQ(r.witnesses.size(), 1u);
  EXPECT_EQ(r.witnesses[0], MultiIndex({1, 1}));
}

TEST(QuasiAbsence, WitnessesSatisfyInequality) {
  const SpectralData s = analyze_linear_part(diag({-1.0, 2.0, 0.5, Complex(0, 0.5)}));
  const ResonanceReport r = check_quasi_absence(s, 8, 1e-9);
  EXPECT_EQ(r.degree_bound, 8);
  ASSERT_FALSE(r.witnesses.empty());
  for (const auto& w : r.witnesses) {
    Complex v = 1.0;
    for (std::size_t i = 0; i < w.size(); ++i) v *= std::pow(s.eigenvalues[i + 1], w[i]);
    EXPECT_LT(std::abs(v - 1.0), 1e-9);
    EXPECT_GE(w.degree(), 1);
    EXPECT_LE(w.degree(), 8);
  }
}

TEST(SmallDenominator, Examples) {
  const SpectralData s = analyze_linear_part(diag({-1.0, 2.0}));
  SmallDenominator d = small_denominator(s, MultiIndex({1, 1}));
  EXPECT_NEAR(std::abs(d.value - 1.0), 0.0, 1e-15);
  EXPECT_FALSE(d.near_resonant);
  d = small_denominator(s, MultiIndex({3, 0}));
  EXPECT_NEAR(std::abs(d.value), 0.0, 1e-15);
  EXPECT_TRUE(d.near_resonant);

  const SpectralData t = analyze_linear_part(diag({Complex(0, 1), 0.5}));
  EXPECT_NEAR(std::abs(small_denominator(t, MultiIndex({0, 2})).value - Complex(-0.25, 1.0)), 0.0, 1e-15);
}

TEST(SmallDenominator, NeverFlaggedForMixedIndicesUnderQuasiAbsence) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    RandomGermOptions o;
    o.n = 2 + rep % 2;
    o.q = 1 + rep % 4;
    o.N = 6;
    const SpectralData s = spectral(random_semi_hyperbolic(o, rng));
    ASSERT_TRUE(check_quasi_absence(s, o.q * o.N, s.tol).quasi_absent);
    for (int d = 2; d <= o.N; ++d)
      for (const auto& m : monomials_of_degree(o.n, d))
        if (m[0] != d) EXPECT_FALSE(small_denominator(s, m).near_resonant);
  }
}

TEST(SmallDenominator, ResonanceRaisedToQIsAWitness) {
  // lambda_1 = Lambda^P with P = (1, 1, 1) forces (lambda_2 lambda_3)^q = 1.
  const Complex l1 = primitive_root(1, 3);
  const SpectralData s = analyze_linear_part(diag({l1, 2.0, 0.5}));
  EXPECT_TRUE(small_denominator(s, MultiIndex({1, 1, 1})).near_resonant);
  EXPECT_FALSE(check_quasi_absence(s, s.q * 3, s.tol).quasi_absent);
}
