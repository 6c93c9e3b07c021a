#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "bendkit/floquet.hpp"
#include "bendkit/surface.hpp"

using namespace bendkit;

namespace {

constexpr double kPi = std::numbers::pi;

PeriodicProfile cosine(int k, double amp) {
  std::vector<double> a(k + 1, 0.0);
  a[0] = 1;
  a[k] += amp;
  return PeriodicProfile(a, {});
}

// small random perturbation of the constant profile
PeriodicProfile random_profile(std::mt19937& g, int deg, double amp) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> a(deg + 1), b(deg + 1);
  a[0] = 1;
  b[0] = 0;
  for (int k = 1; k <= deg; ++k) {
    a[k] = amp * U(g) / (k * k);
    b[k] = amp * U(g) / (k * k);
  }
  return PeriodicProfile(a, b);
}

Eigen::Matrix2d rotation_generator() {
  Eigen::Matrix2d G;
  G << 0, -1, 1, 0;
  return G;
}

}  // namespace

TEST(PolarHessian, ConstantProfileDegreeTwo) {
  for (double th : {0.0, 0.7, 2.0, 5.5}) {
    HessianCoeffs h = polar_hessian(2, PeriodicProfile::constant(1), th);
    EXPECT_NEAR(h.zss, 2, 1e-14);
    EXPECT_NEAR(h.zst, 0, 1e-14);
    EXPECT_NEAR(h.ztt, 2, 1e-14);
  }
}

TEST(PolarHessian, AtThetaZero) {
  std::mt19937 g(1);
  PeriodicProfile P = random_profile(g, 5, 0.2);
  for (double m : {2.0, 2.5, 4.0}) {
    HessianCoeffs h = polar_hessian(m, P, 0);
    EXPECT_NEAR(h.zss, m * (m - 1) * P(0), 1e-13);
    EXPECT_NEAR(h.zst, (m - 1) * P.value(0, 1), 1e-13);
  }
}

TEST(PolarHessian, LaplacianCollapses) {
  std::mt19937 g(2);
  PeriodicProfile P = random_profile(g, 6, 0.3);
  for (double m : {2.0, 3.3})
    for (double th = 0; th < 6.3; th += 0.4) {
      HessianCoeffs h = polar_hessian(m, P, th);
      EXPECT_NEAR(h.zss + h.ztt, m * m * P(th) + P.value(th, 2), 1e-12);
    }
}

TEST(PolarHessian, MatchesCartesianFiniteDifferences) {
  std::mt19937 g(3);
  PeriodicProfile P = random_profile(g, 4, 0.3);
  const double m = 2.7, h = 1e-4;
  auto z = [&](double s, double t) { return std::pow(s * s + t * t, m / 2) * P(std::atan2(t, s)); };
  for (double th : {0.3, 1.9, 4.4}) {
    double s = std::cos(th), t = std::sin(th);
    HessianCoeffs c = polar_hessian(m, P, th);
    EXPECT_NEAR(c.zss, (z(s + h, t) - 2 * z(s, t) + z(s - h, t)) / (h * h), 1e-5);
    EXPECT_NEAR(c.ztt, (z(s, t + h) - 2 * z(s, t) + z(s, t - h)) / (h * h), 1e-5);
    EXPECT_NEAR(c.zst, (z(s + h, t + h) - z(s + h, t - h) - z(s - h, t + h) + z(s - h, t - h)) / (4 * h * h), 1e-5);
  }
}

TEST(CurvatureMargin, ConstantProfile) {
  EXPECT_NEAR(curvature_margin(2, PeriodicProfile::constant(1)).margin, 4, 1e-12);
  EXPECT_TRUE(curvature_margin(2, PeriodicProfile::constant(1)).violating.empty());
}

TEST(CurvatureMargin, MatchesDenseGrid) {
  for (double amp : {0.3, 0.9}) {
    PeriodicProfile P = cosine(2, amp);
    double mn = 1e300;
    for (int i = 0; i < 200000; ++i) {
      double th = 2 * kPi * i / 200000;
      double p = P(th), p1 = P.value(th, 1), p2 = P.value(th, 2);
      mn = std::min(mn, 4 * p * p + 2 * p * p2 - p1 * p1);
    }
    CurvatureMargin c = curvature_margin(2, P);
    EXPECT_NEAR(c.margin, mn, 1e-8) << amp;
    EXPECT_EQ(c.margin > 0, mn > 0);
  }
  EXPECT_GT(curvature_margin(2, cosine(2, 0.3)).margin, 0);
}

TEST(CurvatureMargin, ReportsViolatingAngles) {
  CurvatureMargin c = curvature_margin(2, cosine(4, 0.3));
  EXPECT_LT(c.margin, 0);
  ASSERT_EQ(c.violating.size(), 4u);
  for (double th : c.violating) EXPECT_NEAR(std::remainder(th, kPi / 2), 0, 1e-6);
}

TEST(CoefficientMatrices, ConstantProfile) {
  CoefficientMatrices cm(2, PeriodicProfile::constant(1));
  for (double th : {0.0, 1.0, 3.0}) {
    EXPECT_LT((cm.lam(th) - rotation_generator()).norm(), 1e-14);
    EXPECT_LT((cm.ham(th) - Eigen::Matrix2d::Identity()).norm(), 1e-14);
  }
}

TEST(CoefficientMatrices, TraceFreeAndSymmetricHamiltonian) {
  std::mt19937 g(4);
  std::uniform_real_distribution<double> U(0, 2 * kPi);
  for (int k = 0; k < 5; ++k) {
    CoefficientMatrices cm(2 + k * 0.6, random_profile(g, 5, 0.15));
    for (int i = 0; i < 20; ++i) {
      double th = U(g);
      EXPECT_NEAR(cm.lam(th).trace(), 0, 1e-13);
      Eigen::Matrix2d H = cm.ham(th);
      EXPECT_NEAR(H(0, 1), H(1, 0), 1e-12);
    }
  }
}

TEST(CoefficientMatrices, IndependentOfRadius) {
  std::mt19937 g(5);
  const double m = 2.6;
  PeriodicProfile P = random_profile(g, 4, 0.15);
  auto S = ParametricSurface::homogeneous(m, P, Domain::annulus(0.5, 4));
  CoefficientMatrices cm(m, P);
  for (double th : {0.2, 2.2, 4.1}) {
    for (double r : {1.0, 3.0}) {
      SurfaceJet j = S.jet(r * std::cos(th), r * std::sin(th));
      Eigen::Matrix2d L;
      L << j.Rst.z(), -j.Rss.z(), j.Rtt.z(), -j.Rst.z();
      L /= (m * m - m) * j.R.z() / (r * r);
      EXPECT_LT((L - cm.lam(th)).norm(), 1e-12) << r;
    }
  }
}

TEST(BInvariants, ConstantProfileDegreeTwo) {
  BInvariants b = b_invariants(2, PeriodicProfile::constant(1));
  EXPECT_NEAR(b.b1, 2 * kPi, 1e-10);
  EXPECT_NEAR(b.b2, 0, 1e-10);
  EXPECT_TRUE(b.singular_flags.empty());
}

TEST(BInvariants, ConstantProfileGeneralDegree) {
  for (double m : {2.5, 3.0, 4.0}) {
    BInvariants b = b_invariants(m, PeriodicProfile::constant(1));
    EXPECT_NEAR(b.b1, 2 * kPi / std::sqrt(m - 1), 1e-10) << m;
  }
}

TEST(BInvariants, LinearIdentityHolds) {
  // m b1 - 2 b2 = 4 pi for every admissible profile
  std::mt19937 g(6);
  for (int k = 0; k < 6; ++k) {
    double m = 2 + 0.5 * k;
    PeriodicProfile P = random_profile(g, 6, 0.12);
    ASSERT_GT(curvature_margin(m, P).margin, 0);
    BInvariants b = b_invariants(m, P);
    EXPECT_GT(b.b1, 0);
    EXPECT_NEAR(m * b.b1 - 2 * b.b2, 4 * kPi, 1e-8) << m;
  }
}

TEST(BInvariants, ReflectionInvariant) {
  std::mt19937 g(7);
  PeriodicProfile P = random_profile(g, 5, 0.12);
  std::vector<double> sn = P.sin_coeffs();
  for (double& x : sn) x = -x;
  PeriodicProfile R(P.cos_coeffs(), sn);
  BInvariants a = b_invariants(2.5, P), b = b_invariants(2.5, R);
  EXPECT_NEAR(a.b1, b.b1, 1e-10);
  EXPECT_NEAR(a.b2, b.b2, 1e-10);
}

TEST(BInvariants, SymmetricProfileHasNonzeroB2) {
  // the reflection symmetry does not force b2 to vanish
  BInvariants b = b_invariants(2, cosine(4, 0.1));
  EXPECT_NEAR(b.b2, b.b1 - 2 * kPi, 1e-9);
  EXPECT_GT(std::abs(b.b2), 0.1);
}

TEST(AsymptoticEigenvalue, Arithmetic) {
  EXPECT_NEAR(asymptotic_eigenvalue(5, 2 * kPi, 0), 2.5, 1e-15);
  EXPECT_NEAR(asymptotic_eigenvalue(1, kPi, kPi / 2), 1.5, 1e-15);
  EXPECT_THROW(asymptotic_eigenvalue(1, 0, 0), Error);
}

TEST(Monodromy, RotationForConstantProfile) {
  for (double l : {0.0, 0.3, 1.0, 2.75}) {
    Eigen::Matrix2d Phi = monodromy(2, PeriodicProfile::constant(1), l);
    Eigen::Matrix2d R;
    double c = std::cos(2 * kPi * l), s = std::sin(2 * kPi * l);
    R << c, -s, s, c;
    EXPECT_LT((Phi - R).norm(), 1e-9) << l;
    EXPECT_NEAR(Phi.trace(), 2 * c, 1e-9);
  }
}

TEST(Monodromy, MatrixExponentialOracleForRotationalSymmetry) {
  // Lambda(th) = R(th) Lambda0 R(th)^T, so Phi = exp(2 pi (lambda Lambda0 - G))
  for (double m : {2.5, 3.0, 4.0}) {
    CoefficientMatrices cm(m, PeriodicProfile::constant(1));
    Eigen::Matrix2d L0 = cm.lam(0);
    for (double l : {0.4, 1.7, 3.2}) {
      Eigen::Matrix2d A = 2 * kPi * (l * L0 - rotation_generator());
      Eigen::Matrix2d expect = A.exp();
      EXPECT_LT((monodromy(cm, l) - expect).norm(), 1e-8 * std::max(1.0, expect.norm())) << m << " " << l;
    }
  }
}

TEST(Monodromy, UnitDeterminant) {
  std::mt19937 g(8);
  std::uniform_real_distribution<double> U(0, 10);
  CoefficientMatrices cm(2.5, random_profile(g, 5, 0.12));
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(monodromy(cm, U(g)).determinant(), 1, 1e-9);
  EXPECT_LT((monodromy(cm, 0) - Eigen::Matrix2d::Identity()).norm(), 1e-14);
}

TEST(Monodromy, DerivativeMatchesFiniteDifference) {
  std::mt19937 g(9);
  CoefficientMatrices cm(3, random_profile(g, 4, 0.12));
  const double h = 1e-5;
  for (double l : {0.8, 3.1}) {
    auto [Phi, dPhi] = monodromy_with_derivative(cm, l);
    EXPECT_LT((Phi - monodromy(cm, l)).norm(), 1e-10);
    Eigen::Matrix2d fd = (monodromy(cm, l + h) - monodromy(cm, l - h)) / (2 * h);
    EXPECT_LT((dPhi - fd).norm(), 1e-5 * std::max(1.0, dPhi.norm()));
  }
}

TEST(Nonresonance, ConstantProfileFailsAtOrderTwo) {
  NonresonanceReport r = nonresonance(2 * kPi, 0, 2, 2);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.margin, 0, 1e-12);
  EXPECT_NE(r.collision.find("b1-b2"), std::string::npos);
}

TEST(Nonresonance, PassingExample) {
  NonresonanceReport r = nonresonance(1, 0.3, 2, 2);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.margin, std::min(0.7, kPi - 2.7), 1e-12);
  EXPECT_TRUE(r.collision.empty());
  EXPECT_TRUE(nonresonance(1, 0.3, 2, 1).pass);
}

TEST(Nonresonance, IntegerDegreeReductionAgrees) {
  std::mt19937 g(10);
  std::uniform_real_distribution<double> U(0.5, 5);
  for (int k = 0; k < 50; ++k)
    for (int m : {2, 3, 5}) {
      NonresonanceReport r = nonresonance(U(g), U(g), m, 3, 6);
      EXPECT_DOUBLE_EQ(r.margin, r.reduced_margin);
    }
  EXPECT_TRUE(std::isnan(nonresonance(1, 0.3, 2.5, 3).reduced_margin));
}

TEST(Nonresonance, HigherOrderAlwaysMeetsTheLattice) {
  // with m b1 - 2 b2 = 4 pi, 2 b2 - m b1 lies in pi Z
  BInvariants b = b_invariants(3, cosine(4, 0.05));
  NonresonanceReport r = nonresonance(b.b1, b.b2, 3, 3);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.margin, 1e-8);
}

TEST(PeriodicSolve, ConstantForcingFixture) {
  PeriodicSolution sol = periodic_solve(2, PeriodicProfile::constant(1), 0.5,
                                        [](double) { return Eigen::Vector2d(1, 0); });
  for (auto& x : sol.X) EXPECT_LT((x - Eigen::Vector2d(0, 2)).norm(), 1e-10);
  EXPECT_LT(sol.periodicity_error, 1e-10);
}

TEST(PeriodicSolve, UnforcedSolutionIsZero) {
  PeriodicSolution sol = periodic_solve(2, PeriodicProfile::constant(1), 0.5, nullptr);
  for (auto& x : sol.X) EXPECT_LT(x.norm(), 1e-14);
}

TEST(PeriodicSolve, ResonantForcing) {
  try {
    periodic_solve(2, PeriodicProfile::constant(1), 1.0, [](double) { return Eigen::Vector2d(1, 0); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResonantForcing);
  }
}

TEST(PeriodicSolve, GeneralProfileIsPeriodicAndSolvesTheOde) {
  std::mt19937 g(11);
  PeriodicProfile P = random_profile(g, 4, 0.12);
  CoefficientMatrices cm(2.5, P);
  auto V = [](double th) { return Eigen::Vector2d(std::cos(3 * th), 1 + std::sin(th)); };
  PeriodicSolution sol = periodic_solve(cm, 1.37, V);
  EXPECT_LT(sol.periodicity_error, 1e-8);
  EXPECT_LT(sol.residual, 1e-7);
}
