#include <gtest/gtest.h>

#include "bendkit/bending.hpp"
#include "bendkit/homogeneous_bending.hpp"

using namespace bendkit;

namespace {

PeriodicProfile cosine(int k, double amp) {
  std::vector<double> a(k + 1, 0.0);
  a[0] = 1;
  a[k] += amp;
  return PeriodicProfile(a, {});
}

DeformationFamily family(double m, const PeriodicProfile& P, const BendingConstruction& c, double r0 = 0.2) {
  return {ParametricSurface::homogeneous(m, P, Domain::annulus(r0, 1)), to_fields(c.fields)};
}

}  // namespace

TEST(HomogeneousBending, OrderOneOnConstantProfile) {
  const PeriodicProfile P = PeriodicProfile::constant(1);
  BendingConstruction c = build_bending(2, P);
  ASSERT_EQ(c.fields.size(), 1u);
  EXPECT_GT(c.lambda_p, 2);
  EXPECT_NEAR(c.lambda_p, std::round(c.lambda_p), 1e-8);
  EXPECT_EQ(c.p % 2, 0);
  EXPECT_NEAR(c.fields[0].u.terms()[0].exponent, c.lambda_p, 1e-12);
  EXPECT_NEAR(c.fields[0].w.terms()[0].exponent, c.lambda_p - 1, 1e-12);
  DeformationFamily d = family(2, P, c);
  auto grid = d.surface.domain().grid(20, 40);
  EXPECT_LT(max_bending_residual(d, 1, grid), 1e-7);
  EXPECT_FALSE(is_trivial(d.fields[0], d.surface, 1e-6).trivial);
}

TEST(HomogeneousBending, ExplicitEigenvalueIndex) {
  BendingOptions o;
  o.p = 4;
  o.tag = '-';
  BendingConstruction c = build_bending(2, PeriodicProfile::constant(1), o);
  EXPECT_NEAR(c.lambda_p, 2, 1e-8);
  EXPECT_EQ(c.p, 4);
  o.p = 3;
  EXPECT_THROW(build_bending(2, PeriodicProfile::constant(1), o), Error);
}

TEST(HomogeneousBending, ConstantProfileIsResonantAtOrderTwo) {
  BendingOptions o;
  o.order = 2;
  try {
    build_bending(2, PeriodicProfile::constant(1), o);
    FAIL();
  } catch (const ResonantExponent& e) {
    EXPECT_NE(std::string(e.what()).find("b1-b2"), std::string::npos);
    EXPECT_NEAR(e.exponent, 2 * std::numbers::pi, 1e-9);
  }
}

TEST(HomogeneousBending, OrderOneOnPerturbedProfile) {
  const double m = 2.5;
  const PeriodicProfile P({1, 0, 0.05, 0.04}, {0, 0, 0.03});
  BendingConstruction c = build_bending(m, P);
  DeformationFamily d = family(m, P, c);
  EXPECT_LT(max_bending_residual(d, 1, d.surface.domain().grid(15, 30)), 1e-7);
  DefectFit f = metric_defect_order(d, d.surface.domain().grid(10, 20), {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
  EXPECT_NEAR(f.slope, 2, 0.1);
}

TEST(HomogeneousBending, OrderTwoOnNonresonantProfile) {
  const double m = 3;
  const PeriodicProfile P = cosine(4, 0.05);
  BendingOptions o;
  o.order = 2;
  BendingConstruction c = build_bending(m, P, o);
  EXPECT_TRUE(c.nonresonance.pass);
  ASSERT_EQ(c.fields.size(), 2u);
  EXPECT_FALSE(c.forced_mu.empty());
  EXPECT_LT(c.max_solve_residual, 1e-7);
  EXPECT_LT(c.max_periodicity_error, 1e-8);
  DeformationFamily d = family(m, P, c);
  auto grid = d.surface.domain().grid(20, 40);
  EXPECT_LT(max_bending_residual(d, 1, grid), 1e-6);
  EXPECT_LT(max_bending_residual(d, 2, grid), 1e-6);
  DefectFit f = metric_defect_order(d, grid, {1e-2, 3e-3, 1e-3, 3e-4, 1e-4});
  EXPECT_NEAR(f.slope, 3, 0.1);
  EXPECT_EQ(f.certified_order, 2);
}

TEST(HomogeneousBending, ExponentsMatchPrediction) {
  const double m = 3;
  const PeriodicProfile P = cosine(4, 0.05);
  BendingOptions o;
  o.order = 2;
  BendingConstruction c = build_bending(m, P, o);
  EXPECT_NEAR(c.min_exponent, predicted_min_exponent(c.lambda_p, m, 2), 1e-9);
  for (double mu : c.forced_mu) EXPECT_GE(mu, 2 * c.lambda_p + 1 - 2 * m - 1e-9);
}

TEST(HomogeneousBending, SmoothnessTarget) {
  BendingOptions o;
  o.smooth = 6;
  BendingConstruction c = build_bending(2.5, cosine(3, 0.1), o);
  EXPECT_GE(c.min_exponent, 6);
  EXPECT_GE(predicted_min_exponent(c.lambda_p, 2.5, 1), 6);
}

TEST(HomogeneousBending, SmoothnessUnreachableInWindow) {
  BendingOptions o;
  o.smooth = 10;
  o.lambda_max = 4;
  try {
    build_bending(2, PeriodicProfile::constant(1), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SmoothnessUnreachable);
  }
}

TEST(HomogeneousBending, CurvatureViolation) {
  try {
    build_bending(2, cosine(4, 0.3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CurvatureViolation);
  }
}

TEST(HomogeneousBending, PredictedMinExponent) {
  EXPECT_DOUBLE_EQ(predicted_min_exponent(4, 2, 1), 3);
  EXPECT_DOUBLE_EQ(predicted_min_exponent(4, 2, 2), 3);
  EXPECT_DOUBLE_EQ(predicted_min_exponent(2.5, 2, 2), 1);
  EXPECT_DOUBLE_EQ(predicted_min_exponent(5, 3, 3), 3);
}

TEST(HomogeneousBending, FieldConversionAgreesPointwise) {
  BendingConstruction c = build_bending(2, PeriodicProfile::constant(1));
  VectorField3 U = to_fields(c.fields)[0];
  for (auto [s, t] : std::vector<std::pair<double, double>>{{0.3, 0.4}, {-0.5, 0.1}}) {
    Vec3 u = U(s, t);
    EXPECT_NEAR(u.x(), c.fields[0].u(s, t), 1e-14);
    EXPECT_NEAR(u.y(), c.fields[0].v(s, t), 1e-14);
    EXPECT_NEAR(u.z(), c.fields[0].w(s, t), 1e-14);
  }
}
