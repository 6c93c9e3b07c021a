#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bendkit/polar.hpp"

using namespace bendkit;

namespace {

PeriodicProfile random_profile(std::mt19937& g, int deg) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> a(deg + 1), b(deg + 1);
  for (int k = 0; k <= deg; ++k) {
    a[k] = U(g);
    b[k] = k ? U(g) : 0;
  }
  return PeriodicProfile(a, b);
}

double direct(const PeriodicProfile& p, double th) {
  double s = 0;
  for (int k = 0; k <= p.degree(); ++k) s += p.cos_coeffs()[k] * std::cos(k * th) + p.sin_coeffs()[k] * std::sin(k * th);
  return s;
}

}  // namespace

TEST(PeriodicProfile, ValueMatchesDirectSum) {
  std::mt19937 g(1);
  PeriodicProfile p = random_profile(g, 40);
  for (double th = -3; th < 10; th += 0.37) EXPECT_NEAR(p(th), direct(p, th), 1e-12);
}

TEST(PeriodicProfile, DerivativesMatchFiniteDifferences) {
  std::mt19937 g(2);
  PeriodicProfile p = random_profile(g, 6);
  const double h = 1e-5;
  for (double th : {0.1, 1.3, 4.0}) {
    EXPECT_NEAR(p.value(th, 1), (p(th + h) - p(th - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(p.derivative()(th), p.value(th, 1), 1e-12);
    EXPECT_NEAR(p.value(th, 2), p.derivative().derivative()(th), 1e-11);
  }
}

TEST(PeriodicProfile, ProductIsPointwise) {
  std::mt19937 g(3);
  PeriodicProfile a = random_profile(g, 5), b = random_profile(g, 7);
  PeriodicProfile c = a * b;
  EXPECT_EQ(c.degree(), 12);
  for (double th = 0; th < 6.3; th += 0.5) EXPECT_NEAR(c(th), a(th) * b(th), 1e-12);
}

TEST(PeriodicProfile, FromSamplesReproducesBandLimitedProfile) {
  std::mt19937 g(4);
  PeriodicProfile p = random_profile(g, 9);
  PeriodicProfile q = PeriodicProfile::from_samples(p.sample(64));
  for (double th = 0; th < 6.3; th += 0.3) EXPECT_NEAR(q(th), p(th), 1e-12);
  EXPECT_THROW(PeriodicProfile::from_samples({1.0, 2.0}), Error);
}

TEST(PeriodicProfile, GridMinOfShiftedCosine) {
  PeriodicProfile p({1.0, 0.0, 0.0, 0.0, 0.3}, {});
  EXPECT_NEAR(p.grid_min(), 0.7, 1e-12);
}

TEST(PolarFunction, MergesEqualExponents) {
  PolarFunction f(2.5, PeriodicProfile::constant(1));
  f.add(2.5, PeriodicProfile::constant(2));
  f.add(1.0, PeriodicProfile::constant(0));
  ASSERT_EQ(f.terms().size(), 1u);
  EXPECT_NEAR(f.value_polar(2, 0.3), 3 * std::pow(2, 2.5), 1e-12);
}

TEST(PolarFunction, CartesianDerivativesMatchFiniteDifferences) {
  std::mt19937 g(5);
  PolarFunction f(3.7, random_profile(g, 4));
  f.add(2.2, random_profile(g, 3));
  PolarFunction fs = f.d_s(), ft = f.d_t();
  const double h = 1e-6;
  for (auto [s, t] : std::vector<std::pair<double, double>>{{0.7, 0.2}, {-0.4, 0.9}, {-0.6, -0.5}}) {
    EXPECT_NEAR(fs(s, t), (f(s + h, t) - f(s - h, t)) / (2 * h), 1e-7);
    EXPECT_NEAR(ft(s, t), (f(s, t + h) - f(s, t - h)) / (2 * h), 1e-7);
  }
}

TEST(PolarFunction, ProductAddsExponents) {
  PolarFunction a(1.5, PeriodicProfile({0.0, 1.0}, {})), b(2.0, PeriodicProfile({0.0}, {0.0, 1.0}));
  PolarFunction c = a * b;
  ASSERT_EQ(c.terms().size(), 1u);
  EXPECT_NEAR(c.terms()[0].exponent, 3.5, 1e-15);
  EXPECT_NEAR(c(0.3, 0.4), a(0.3, 0.4) * b(0.3, 0.4), 1e-14);
  EXPECT_NEAR(c.min_exponent(), 3.5, 1e-15);
}
