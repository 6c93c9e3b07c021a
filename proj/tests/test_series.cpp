#include <gtest/gtest.h>

#include <random>

#include "bendkit/series.hpp"

using namespace bendkit;

TEST(Rational, ParsesFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("-2/5"), Rational(-2, 5));
  EXPECT_EQ(parse_rational("0.1"), Rational(1, 10));
  EXPECT_EQ(parse_rational("-1.25"), Rational(-5, 4));
  EXPECT_EQ(parse_rational(" 7 "), Rational(7));
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
}

TEST(Rational, RejectsMalformedInput) {
  for (const char* bad : {"", "1/0", "abc", "1//2", "--1", "1.2.3"}) {
    try {
      parse_rational(bad);
      ADD_FAILURE() << "accepted " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << bad;
    }
  }
}

TEST(Univariate, SetDropsTermsBeyondTruncation) {
  UnivariateSeries s(3);
  s.set(2, 1);
  s.set(5, 7);
  EXPECT_EQ(s.coeffs().size(), 1u);
  EXPECT_EQ(s.coeff(5), 0);
}

TEST(Univariate, ProductTruncationIsTightest) {
  // (1 + t + O(t^4)) * t^2 is known through t^5 and no further
  UnivariateSeries a(3);
  a.set(0, 1);
  a.set(1, 1);
  UnivariateSeries b = UnivariateSeries::monomial(2, 1);
  UnivariateSeries c = a * b;
  EXPECT_EQ(c.trunc(), 5);
  EXPECT_EQ(c.coeff(2), 1);
  EXPECT_EQ(c.coeff(3), 1);
}

TEST(Univariate, GeometricSeriesSquaredGivesBinomialCoefficients) {
  UnivariateSeries g(20);
  for (int k = 0; k <= 20; ++k) g.set(k, 1);
  UnivariateSeries sq = g * g;
  EXPECT_EQ(sq.trunc(), 20);
  for (int k = 0; k <= 20; ++k) EXPECT_EQ(sq.coeff(k), k + 1);
}

TEST(Univariate, ComposePowerScalesTruncation) {
  UnivariateSeries h(4);
  h.set(1, 3);
  h.set(4, -1);
  UnivariateSeries c = h.compose_power(3);
  EXPECT_EQ(c.coeff(3), 3);
  EXPECT_EQ(c.coeff(12), -1);
  EXPECT_EQ(c.trunc(), 14);
}

TEST(Univariate, DerivativeAndShift) {
  UnivariateSeries s = UnivariateSeries::monomial(4, Rational(1, 2)) + UnivariateSeries::monomial(1, 3);
  UnivariateSeries d = s.derivative();
  EXPECT_EQ(d.coeff(3), 2);
  EXPECT_EQ(d.coeff(0), 3);
  EXPECT_EQ(d.shifted(2).coeff(5), 2);
}

TEST(Univariate, EqualityComparesOnCommonTruncation) {
  UnivariateSeries a(3), b(10);
  a.set(1, 2);
  b.set(1, 2);
  b.set(7, 9);
  EXPECT_TRUE(a == b);
  b.set(2, 1);
  EXPECT_FALSE(a == b);
}

TEST(Bivariate, IntegrationInvertsDifferentiation) {
  std::mt19937 g(3);
  std::uniform_int_distribution<int> c(-9, 9);
  BivariateSeries s;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) s.set(i, j, c(g));
  BivariateSeries noconst_x = s.diff_x().integrate_x();
  for (auto& [e, v] : s.coeffs()) {
    if (e.first > 0) EXPECT_EQ(noconst_x.coeff(e.first, e.second), v);
  }
  EXPECT_TRUE(s.diff_y().integrate_y().diff_y() == s.diff_y());
}

TEST(Bivariate, TimesMonomialShiftsExponentsAndBox) {
  BivariateSeries s(5, 4);
  s.set(1, 1, 2);
  BivariateSeries r = s.times_monomial(2, 3, Rational(1, 2));
  EXPECT_EQ(r.coeff(3, 4), 1);
  EXPECT_EQ(r.trunc_x(), 7);
  EXPECT_EQ(r.trunc_y(), 7);
}

TEST(Bivariate, ProductMatchesPointwiseEvaluation) {
  BivariateSeries a, b;
  a.set(1, 0, 1);
  a.set(0, 1, -2);
  b.set(2, 1, Rational(3, 4));
  b.set(0, 0, 1);
  BivariateSeries p = a * b;
  for (double x : {-0.7, 0.3})
    for (double y : {0.2, 1.1}) EXPECT_NEAR(p.eval(x, y), a.eval(x, y) * b.eval(x, y), 1e-14);
}

TEST(Bivariate, SliceRoundTrip) {
  BivariateSeries s;
  s.set(3, 2, 5);
  s.set(0, 2, -1);
  UnivariateSeries sl = s.slice_y(2);
  EXPECT_EQ(sl.coeff(3), 5);
  BivariateSeries t;
  t.add_slice(2, sl);
  EXPECT_TRUE(t.identical(s));
}
