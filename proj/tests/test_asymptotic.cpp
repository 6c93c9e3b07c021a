#include <gtest/gtest.h>

#include <random>

#include "bendkit/asymptotic.hpp"
#include "bendkit/series_bendings.hpp"

using namespace bendkit;

namespace {

Poly2 P(std::initializer_list<std::tuple<int, int, double>> terms) {
  Poly2 p;
  for (auto [i, j, c] : terms) p.add(i, j, c);
  return p;
}

ParametricSurface paraboloid() { return ParametricSurface::graph(P({{2, 0, 1}, {0, 2, 1}}), Domain::rectangle(-1, 1, -1, 1)); }

VectorField3 cubic_field() {
  return VectorField3::polynomial(P({{3, 0, -2.0 / 3}}), P({{0, 3, 2.0 / 3}}), P({{2, 0, 0.5}, {0, 2, -0.5}}));
}

// z = s^3 + t^3 has K > 0 where s t > 0
ParametricSurface s11_patch() {
  return ParametricSurface::graph(P({{3, 0, 1}, {0, 3, 1}}), Domain::rectangle(0.2, 0.6, 0.2, 0.6));
}

VectorField3 s11_field() {
  GeneratorQuad q{UnivariateSeries::monomial(1, 1), {}, {}, {}};
  RecoveredBending rb = recover_bending(build_w(1, 1, 1, q, 20), 1, 1, 1);
  return VectorField3::polynomial(Poly2((*rb.st)[0]), Poly2((*rb.st)[1]), Poly2((*rb.st)[2]));
}

}  // namespace

TEST(AsymptoticData, ParaboloidOrigin) {
  AsymptoticData a = asymptotic_data(paraboloid(), 0, 0);
  EXPECT_NEAR(a.g, 2, 1e-15);
  EXPECT_NEAR(std::abs(a.lambda - cplx(0, 2)), 0, 1e-15);
}

TEST(AsymptoticData, PlaneIsDegenerate) {
  auto S = ParametricSurface::graph(Poly2(), Domain::rectangle(-1, 1, -1, 1));
  AsymptoticData a = asymptotic_data(S, 0.3, 0.1);
  EXPECT_EQ(a.g, 0);
  EXPECT_EQ(std::abs(a.lambda), 0);
}

TEST(AsymptoticData, QuadraticIdentityAndBranch) {
  auto S = paraboloid();
  std::mt19937 g(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 30; ++k) {
    double s = U(g), t = U(g);
    FormData d = fundamental_data(S, s, t);
    AsymptoticData a = asymptotic_data(S, s, t);
    EXPECT_NEAR(a.g, d.g, 1e-15);
    EXPECT_GT(a.lambda.imag(), 0);
    EXPECT_LT(std::abs(a.lambda * a.lambda + 2 * d.f * a.lambda + d.e * d.g), 1e-10 * (1 + d.e * d.g));
  }
}

TEST(AsymptoticData, SaddleIsRejected) {
  auto S = ParametricSurface::graph(P({{2, 0, 1}, {0, 2, -1}}), Domain::rectangle(-1, 1, -1, 1));
  try {
    asymptotic_data(S, 0.1, 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeCurvature);
  }
}

TEST(Vekua, CoefficientCAtParaboloidOrigin) {
  std::vector<VectorField3> f{VectorField3::zero()};
  VekuaCoefficients v = vekua_coefficients(paraboloid(), f, 1, 0, 0);
  EXPECT_NEAR(v.C.real(), -64, 1e-12);
  EXPECT_NEAR(v.C.imag(), 0, 1e-12);
  EXPECT_NEAR(vekua_C_closed_form(paraboloid(), 0, 0), -64, 1e-12);
  EXPECT_EQ(std::abs(v.M), 0);
}

TEST(Vekua, CMatchesClosedFormWhereCurved) {
  std::vector<ParametricSurface> surfaces{paraboloid(), s11_patch(),
                                          ParametricSurface::homogeneous(2.5, PeriodicProfile({1, 0, 0.1}, {0, 0, 0.05}),
                                                                         Domain::annulus(0.3, 1))};
  std::vector<VectorField3> f{VectorField3::zero()};
  for (auto& S : surfaces)
    for (auto& p : S.domain().grid(6, 6)) {
      double Cc = vekua_C_closed_form(S, p.s, p.t);
      VekuaCoefficients v = vekua_coefficients(S, f, 1, p.s, p.t);
      EXPECT_LT(std::abs(v.C - Cc), 1e-9 * std::abs(Cc));
      EXPECT_LT(Cc, 0);
    }
}

TEST(Vekua, FlatPointIsReported) {
  auto S = ParametricSurface::graph(P({{4, 0, 1}, {0, 4, 1}}), Domain::rectangle(-1, 1, -1, 1));
  std::vector<VectorField3> f{VectorField3::zero()};
  try {
    vekua_coefficients(S, f, 1, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FlatPointDegeneracy);
  }
}

TEST(Vekua, TrivialBendingsHaveZeroResidual) {
  auto S = paraboloid();
  std::mt19937 g(2);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int k = 0; k < 5; ++k) {
    std::vector<VectorField3> f{trivial_field(Vec3(U(g), U(g), U(g)), Vec3(U(g), U(g), U(g)), S)};
    for (auto& p : S.domain().grid(5, 5)) EXPECT_LT(std::abs(vekua_residual(S, f, 1, p.s, p.t)), 1e-9);
  }
}

TEST(Vekua, CubicBendingOnParaboloid) {
  auto S = paraboloid();
  std::vector<VectorField3> f{cubic_field()};
  for (auto& p : S.domain().grid(7, 7)) EXPECT_LT(std::abs(vekua_residual(S, f, 1, p.s, p.t)), 1e-9);
}

TEST(Vekua, SeriesBendingOnPositivePatch) {
  auto S = s11_patch();
  std::vector<VectorField3> f{s11_field()};
  DeformationFamily d{S, f};
  EXPECT_LT(max_bending_residual(d, 1, S.domain().grid(9, 9)), 1e-12);
  for (auto& p : S.domain().grid(9, 9)) EXPECT_LT(std::abs(vekua_residual(S, f, 1, p.s, p.t)), 1e-6);
}

TEST(Vekua, NonBendingHasLargeResidual) {
  auto S = paraboloid();
  std::vector<VectorField3> f{trivial_field(Vec3(0.2, 0.1, -0.3), Vec3(1, 0, 0), S) +
                              VectorField3::polynomial(P({{1, 0, 1}}), Poly2(), Poly2())};
  for (auto [s, t] : std::vector<std::pair<double, double>>{{0.3, 0.2}, {-0.5, 0.4}, {0.7, -0.6}})
    EXPECT_GT(std::abs(vekua_residual(S, f, 1, s, t)), 1e-2);
}

TEST(Vekua, MissingFields) {
  std::vector<VectorField3> f{VectorField3::zero()};
  EXPECT_THROW(vekua_residual(paraboloid(), f, 2, 0.1, 0.1), Error);
}

TEST(PhiPsi, BasisRoundTrips) {
  const double g = 2;
  const cplx lam(0, 2);
  cplx h = h_from_phi_psi(g, lam, 1, 0);
  EXPECT_NEAR(std::abs(h - cplx(2, 0)), 0, 1e-15);
  PhiPsi r = phi_psi_from_h(g, lam, h);
  EXPECT_NEAR(std::abs(r.phi - cplx(1)), 0, 1e-15);
  EXPECT_NEAR(std::abs(r.psi), 0, 1e-15);
  h = h_from_phi_psi(g, lam, 0, 1);
  EXPECT_NEAR(std::abs(h - lam), 0, 1e-15);
  r = phi_psi_from_h(g, lam, h);
  EXPECT_NEAR(std::abs(r.phi), 0, 1e-15);
  EXPECT_NEAR(std::abs(r.psi - cplx(1)), 0, 1e-15);
}

TEST(PhiPsi, RealFieldsGiveRealComponents) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int k = 0; k < 50; ++k) {
    double g = U(gen) + 3;
    cplx lam(U(gen), std::abs(U(gen)) + 0.1);
    double phi = U(gen), psi = U(gen);
    PhiPsi r = phi_psi_from_h(g, lam, h_from_phi_psi(g, lam, phi, psi));
    EXPECT_LT(std::abs(r.phi.imag()) + std::abs(r.psi.imag()), 1e-12);
    EXPECT_NEAR(r.phi.real(), phi, 1e-12);
    EXPECT_NEAR(r.psi.real(), psi, 1e-12);
  }
}

TEST(PhiPsi, SingularConversion) {
  for (auto [g, lam] : std::vector<std::pair<double, cplx>>{{2, cplx(1, 0)}, {0, cplx(0, 1)}}) {
    try {
      phi_psi_from_h(g, lam, cplx(1, 1));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SingularConversion);
    }
  }
}
