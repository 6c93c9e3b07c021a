#pragma once

#include <Eigen/Dense>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "fourier.hpp"

namespace bendkit {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct HomogeneousSurface {
  double m = 2;
  PeriodicProfile profile;
};

inline void check_homogeneous(double m, const PeriodicProfile& P) {
  if (!(m >= 2)) throw Error(ErrorKind::InvalidArgument, "homogeneity order m must be >= 2");
  if (!(P.grid_min() > 0)) throw Error(ErrorKind::InvalidArgument, "profile P must be positive");
}

struct HessianCoeffs {
  double zss = 0, zst = 0, ztt = 0;
};

// coefficients of r^{m-2} in z_ss, z_st, z_tt for z = r^m P(theta)
inline HessianCoeffs polar_hessian(double m, double P, double P1, double P2, double th) {
  const double C = std::cos(th), S = std::sin(th);
  HessianCoeffs h;
  h.zss = (m - 1) * m * C * C * P - 2 * (m - 1) * S * C * P1 + m * S * S * P + P2 * S * S;
  h.zst = (m - 2) * m * S * C * P + (m - 1) * (C * C - S * S) * P1 - P2 * S * C;
  h.ztt = (m - 1) * m * S * S * P + 2 * (m - 1) * S * C * P1 + m * C * C * P + P2 * C * C;
  return h;
}

inline HessianCoeffs polar_hessian(double m, const PeriodicProfile& P, double th) {
  return polar_hessian(m, P.value(th), P.value(th, 1), P.value(th, 2), th);
}

struct CurvatureMargin {
  double margin = 0;                  // min over theta
  double argmin = 0;
  std::vector<double> violating;      // local minima with negative value
};

inline double curvature_function(double m, const PeriodicProfile& P, double th) {
  double p = P.value(th), p1 = P.value(th, 1), p2 = P.value(th, 2);
  return m * m * p * p + m * p * p2 - (m - 1) * p1 * p1;
}

inline CurvatureMargin curvature_margin(double m, const PeriodicProfile& P, int grid = 4096) {
  std::vector<double> v(grid);
  for (int i = 0; i < grid; ++i) v[i] = curvature_function(m, P, kTwoPi * i / grid);
  CurvatureMargin cm;
  cm.margin = std::numeric_limits<double>::infinity();
  const double h = kTwoPi / grid;
  for (int i = 0; i < grid; ++i) {
    double prev = v[(i + grid - 1) % grid], next = v[(i + 1) % grid];
    if (v[i] > prev || v[i] > next) continue;
    auto f = [&](double th) { return curvature_function(m, P, th); };
    auto r = boost::math::tools::brent_find_minima(f, kTwoPi * i / grid - h, kTwoPi * i / grid + h, 52);
    double th = std::fmod(r.first + kTwoPi, kTwoPi);
    if (r.second < cm.margin) {
      cm.margin = r.second;
      cm.argmin = th;
    }
    if (r.second < 0) cm.violating.push_back(th);
  }
  return cm;
}

// Lambda(theta) = [[zst, -zss], [ztt, -zst]] / ((m^2-m) P), H = J Lambda
class CoefficientMatrices {
public:
  CoefficientMatrices(double m, PeriodicProfile P) : m_(m), P_(std::move(P)), P1_(P_.derivative()), P2_(P1_.derivative()) {}

  double m() const { return m_; }
  const PeriodicProfile& profile() const { return P_; }

  Eigen::Matrix2d lam(double th) const {
    double p = P_(th);
    HessianCoeffs h = polar_hessian(m_, p, P1_(th), P2_(th), th);
    Eigen::Matrix2d L;
    L << h.zst, -h.zss, h.ztt, -h.zst;
    return L / ((m_ * m_ - m_) * p);
  }

  Eigen::Matrix2d ham(double th) const {
    Eigen::Matrix2d J;
    J << 0, 1, -1, 0;
    return J * lam(th);
  }

  // P'/P, used by the conversion between the rho and r frames
  double log_derivative(double th) const { return P1_(th) / P_(th); }
  double P(double th) const { return P_(th); }
  double P1(double th) const { return P1_(th); }
  double P2(double th) const { return P2_(th); }

private:
  double m_;
  PeriodicProfile P_, P1_, P2_;
};

inline CoefficientMatrices coefficient_matrices(double m, const PeriodicProfile& P) { return CoefficientMatrices(m, P); }

struct Interval {
  double lo = 0, hi = 0;
};

// b2 = (1/4) int (c1 - c2); with this orientation lambda_j ~ (j pi + b2) / b1 for X' = lambda Lambda X
struct BInvariants {
  double b1 = 0, b2 = 0;
  double c_integral = 0;  // int_0^{2 pi} (c1 - c2)
  double error_estimate = 0;
  std::vector<Interval> singular_flags;
};

namespace detail {

// c1 - c2 = zst / sqrt(zss ztt - zst^2) * (ztt'/ztt - zss'/zss)
struct BIntegrands {
  double m;
  PeriodicProfile P, P1, P2, P3;

  explicit BIntegrands(double m_, const PeriodicProfile& p) : m(m_), P(p), P1(p.derivative()), P2(P1.derivative()), P3(P2.derivative()) {}

  double b(double th) const {
    double p = P(th);
    HessianCoeffs h = polar_hessian(m, p, P1(th), P2(th), th);
    return std::sqrt(std::max(h.zss * h.ztt - h.zst * h.zst, 0.0)) / ((m * m - m) * p);
  }

  // theta derivatives of zss and ztt brackets
  std::pair<double, double> hessian_derivs(double th) const {
    const double C = std::cos(th), S = std::sin(th);
    const double p = P(th), p1 = P1(th), p2 = P2(th), p3 = P3(th);
    const double CC = C * C, SS = S * S, SC = S * C, c2 = CC - SS;
    double dzss = (m - 1) * m * (-2 * SC * p + CC * p1) - 2 * (m - 1) * (c2 * p1 + SC * p2) +
                  m * (2 * SC * p + SS * p1) + p3 * SS + 2 * p2 * SC;
    double dztt = (m - 1) * m * (2 * SC * p + SS * p1) + 2 * (m - 1) * (c2 * p1 + SC * p2) +
                  m * (-2 * SC * p + CC * p1) + p3 * CC - 2 * p2 * SC;
    return {dzss, dztt};
  }

  double c1_minus_c2(double th) const {
    HessianCoeffs h = polar_hessian(m, P(th), P1(th), P2(th), th);
    auto [dss, dtt] = hessian_derivs(th);
    double det = h.zss * h.ztt - h.zst * h.zst;
    return h.zst / std::sqrt(det) * (dtt / h.ztt - dss / h.zss);
  }
};

}  // namespace detail

inline BInvariants b_invariants(double m, const PeriodicProfile& P, int grid = 4096) {
  check_homogeneous(m, P);
  detail::BIntegrands I(m, P);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  BInvariants out;
  // flag where zss or ztt reach zero
  std::vector<double> zeros;
  for (int i = 0; i < grid; ++i) {
    double th = kTwoPi * i / grid;
    HessianCoeffs h = polar_hessian(m, P, th);
    double scale = std::abs(h.zss) + std::abs(h.ztt) + std::abs(h.zst);
    if (std::min(h.zss, h.ztt) <= 1e-10 * scale || h.zss * h.ztt - h.zst * h.zst <= 1e-12 * scale * scale)
      zeros.push_back(th);
  }
  double e1 = 0, e2 = 0;
  if (zeros.empty()) {
    out.b1 = GK::integrate([&](double t) { return I.b(t); }, 0, kTwoPi, 15, 1e-14, &e1);
    out.c_integral = GK::integrate([&](double t) { return I.c1_minus_c2(t); }, 0, kTwoPi, 15, 1e-14, &e2);
    out.b2 = 0.25 * out.c_integral;
    out.error_estimate = e1 + 0.25 * e2;
    return out;
  }
  // excise neighbourhoods of the zeros; shrink them to test integrability
  auto integrate_excised = [&](double delta, double& err) {
    std::vector<Interval> cut;
    for (double z : zeros) {
      if (!cut.empty() && z - delta <= cut.back().hi)
        cut.back().hi = z + delta;
      else
        cut.push_back({z - delta, z + delta});
    }
    double s1 = 0, s2 = 0;
    err = 0;
    double lo = cut.front().hi;
    for (std::size_t k = 0; k < cut.size(); ++k) {
      double hi = k + 1 < cut.size() ? cut[k + 1].lo : cut.front().lo + kTwoPi;
      if (hi > lo) {
        double ea = 0, eb = 0;
        s1 += GK::integrate([&](double t) { return I.b(t); }, lo, hi, 40, 1e-12, &ea);
        s2 += GK::integrate([&](double t) { return I.c1_minus_c2(t); }, lo, hi, 40, 1e-12, &eb);
        err += ea + 0.25 * eb;
      }
      if (k + 1 < cut.size()) lo = cut[k + 1].hi;
    }
    out.singular_flags = cut;
    return std::pair<double, double>{s1, s2};
  };
  double delta = 2 * kTwoPi / grid, err = 0;
  auto prev = integrate_excised(delta, err);
  double last_change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 6; ++it) {
    delta /= 2;
    auto cur = integrate_excised(delta, err);
    double change = std::abs(cur.second - prev.second) + std::abs(cur.first - prev.first);
    if (it >= 2 && change > 0.9 * last_change && change > 1e-8)
      throw Error(ErrorKind::NonIntegrableCoefficient, "c1 - c2 integral does not settle as the excision shrinks");
    last_change = change;
    prev = cur;
  }
  out.b1 = prev.first;
  out.c_integral = prev.second;
  out.b2 = 0.25 * prev.second;
  out.error_estimate = err + last_change;
  for (auto& iv : out.singular_flags) {
    iv.lo = std::fmod(iv.lo + kTwoPi, kTwoPi);
    iv.hi = std::fmod(iv.hi + kTwoPi, kTwoPi);
  }
  return out;
}

inline double asymptotic_eigenvalue(int j, double b1, double b2) {
  if (!(b1 > 0)) throw Error(ErrorKind::InvalidArgument, "b1 must be positive");
  return j * std::numbers::pi / b1 + b2 / b1;
}

namespace detail {

inline double dist_pi_z(double x) { return std::abs(x - std::numbers::pi * std::round(x / std::numbers::pi)); }

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N, class Sys, class Obs>
void integrate_on(Sys sys, State<N>& x, const std::vector<double>& times, Obs obs, double tol = 1e-12) {
  namespace ode = boost::numeric::odeint;
  try {
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State<N>>());
    ode::integrate_times(stepper, sys, x, times.begin(), times.end(), 1e-3, obs);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::IntegratorFailure, e.what());
  }
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorKind::IntegratorFailure, "non-finite state");
}

}  // namespace detail

inline Eigen::Matrix2d monodromy(const CoefficientMatrices& cm, double lambda) {
  detail::State<4> x = {1, 0, 0, 1};
  auto sys = [&](const detail::State<4>& y, detail::State<4>& dy, double th) {
    Eigen::Matrix2d L = lambda * cm.lam(th);
    Eigen::Map<const Eigen::Matrix2d> Y(y.data());
    Eigen::Map<Eigen::Matrix2d> D(dy.data());
    D = L * Y;
  };
  detail::integrate_on<4>(sys, x, {0.0, kTwoPi}, [](const detail::State<4>&, double) {});
  return Eigen::Map<Eigen::Matrix2d>(x.data());
}

inline Eigen::Matrix2d monodromy(double m, const PeriodicProfile& P, double lambda) {
  return monodromy(CoefficientMatrices(m, P), lambda);
}

// monodromy and its lambda-derivative
inline std::pair<Eigen::Matrix2d, Eigen::Matrix2d> monodromy_with_derivative(const CoefficientMatrices& cm, double lambda) {
  detail::State<8> x = {1, 0, 0, 1, 0, 0, 0, 0};
  auto sys = [&](const detail::State<8>& y, detail::State<8>& dy, double th) {
    Eigen::Matrix2d L = cm.lam(th);
    Eigen::Map<const Eigen::Matrix2d> F(y.data()), G(y.data() + 4);
    Eigen::Map<Eigen::Matrix2d> dF(dy.data()), dG(dy.data() + 4);
    dF = lambda * L * F;
    dG = L * F + lambda * L * G;
  };
  detail::integrate_on<8>(sys, x, {0.0, kTwoPi}, [](const detail::State<8>&, double) {});
  return {Eigen::Map<Eigen::Matrix2d>(x.data()), Eigen::Map<Eigen::Matrix2d>(x.data() + 4)};
}

struct NonresonanceReport {
  int order = 1;
  bool pass = true;
  double margin = std::numeric_limits<double>::infinity();
  std::string collision;  // empty on pass
  // integer m: (b2 N + b1 Z) cap pi Z over the same k range
  double reduced_margin = std::numeric_limits<double>::quiet_NaN();
};

inline NonresonanceReport nonresonance(double b1, double b2, double m, int l, int window = 8, double tol = 1e-6) {
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "window must be >= 1");
  NonresonanceReport rep;
  rep.order = l;
  if (l <= 1) return rep;
  std::ostringstream why;
  why.precision(12);
  if (l == 2) {
    double x1 = b1 - b2, x2 = (2 * m - 1) * b1 - b2;
    double d1 = detail::dist_pi_z(x1), d2 = detail::dist_pi_z(x2);
    rep.margin = std::min(d1, d2);
    rep.pass = rep.margin > tol;
    if (!rep.pass) {
      double x = d1 <= d2 ? x1 : x2;
      why << (d1 <= d2 ? "b1-b2" : "(2m-1)b1-b2") << " = " << x << " lies in pi*Z (" << std::round(x / std::numbers::pi)
          << "*pi, distance " << std::min(d1, d2) << ")";
      rep.collision = why.str();
    }
    return rep;
  }
  // a b2 + c b1 = d m b1 + e pi, a,d in N, c in Z
  double best = std::numeric_limits<double>::infinity();
  int ba = 0, bc = 0, bd = 0;
  for (int a = 1; a <= window; ++a)
    for (int c = -window; c <= window; ++c)
      for (int d = 1; d <= window; ++d) {
        double x = a * b2 + (c - d * m) * b1;
        double dist = detail::dist_pi_z(x);
        if (dist < best) {
          best = dist;
          ba = a;
          bc = c;
          bd = d;
        }
      }
  rep.margin = best;
  rep.pass = best > tol;
  if (!rep.pass) {
    why << ba << "*b2 + " << bc << "*b1 - " << bd << "*m*b1 lies within " << best << " of pi*Z";
    rep.collision = why.str();
  }
  if (m == std::round(m)) {
    const int mi = static_cast<int>(m);
    double red = std::numeric_limits<double>::infinity();
    for (int a = 1; a <= window; ++a)
      for (int k = -window - window * mi; k <= window - mi; ++k) red = std::min(red, detail::dist_pi_z(a * b2 + k * b1));
    rep.reduced_margin = red;
  }
  return rep;
}

struct PeriodicSolution {
  double mu = 0;
  std::vector<double> theta;          // 2 pi k / N, k = 0..N-1
  std::vector<Eigen::Vector2d> X, dX;  // solution and X' = mu Lambda X + V
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  double periodicity_error = 0;       // |X(2 pi) - X(0)|
  double residual = 0;                // spectral derivative vs right-hand side
};

using Forcing = std::function<Eigen::Vector2d(double)>;

namespace detail {

// X' = mu Lambda X + V on the sample grid from x0; appends X(2 pi) last
inline std::vector<Eigen::Vector2d> propagate(const CoefficientMatrices& cm, double mu, const Forcing& V,
                                              const Eigen::Vector2d& x0, int N) {
  std::vector<double> times(N + 1);
  for (int k = 0; k <= N; ++k) times[k] = kTwoPi * k / N;
  State<2> x = {x0(0), x0(1)};
  std::vector<Eigen::Vector2d> out;
  auto sys = [&](const State<2>& y, State<2>& dy, double th) {
    Eigen::Vector2d r = mu * cm.lam(th) * Eigen::Vector2d(y[0], y[1]);
    if (V) r += V(th);
    dy = {r(0), r(1)};
  };
  integrate_on<2>(sys, x, times, [&](const State<2>& y, double) { out.emplace_back(y[0], y[1]); });
  return out;
}

inline double spectral_residual(const std::vector<Eigen::Vector2d>& X, const std::vector<Eigen::Vector2d>& dX) {
  const std::size_t N = X.size();
  double res = 0, scale = 1;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> v(N);
    for (std::size_t k = 0; k < N; ++k) v[k] = X[k](c);
    PeriodicProfile d = PeriodicProfile::from_samples(v).derivative();
    for (std::size_t k = 0; k < N; ++k) {
      res = std::max(res, std::abs(d(kTwoPi * k / N) - dX[k](c)));
      scale = std::max(scale, std::abs(dX[k](c)));
    }
  }
  return res / scale;
}

}  // namespace detail

// unique 2 pi-periodic solution of X' = mu Lambda X + V
inline PeriodicSolution periodic_solve(const CoefficientMatrices& cm, double mu, const Forcing& V, int N = 256,
                                       double cond_limit = 1e9) {
  // Phi and the particular solution from X(0) = 0 in one sweep
  detail::State<6> x = {1, 0, 0, 1, 0, 0};
  auto sys = [&](const detail::State<6>& y, detail::State<6>& dy, double th) {
    Eigen::Matrix2d L = mu * cm.lam(th);
    Eigen::Map<const Eigen::Matrix2d> F(y.data());
    Eigen::Map<Eigen::Matrix2d> dF(dy.data());
    dF = L * F;
    Eigen::Vector2d r = L * Eigen::Vector2d(y[4], y[5]);
    if (V) r += V(th);
    dy[4] = r(0);
    dy[5] = r(1);
  };
  detail::integrate_on<6>(sys, x, {0.0, kTwoPi}, [](const detail::State<6>&, double) {});
  Eigen::Matrix2d Phi = Eigen::Map<Eigen::Matrix2d>(x.data());
  Eigen::Vector2d xp(x[4], x[5]);
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity() - Phi;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
  double smax = svd.singularValues()(0), smin = svd.singularValues()(1);
  if (!(smin > 0) || smax / smin > cond_limit || smin < 1e-10)
    throw Error(ErrorKind::ResonantForcing, "I - Phi is singular at mu = " + std::to_string(mu));
  PeriodicSolution sol;
  sol.mu = mu;
  sol.x0 = M.partialPivLu().solve(xp);
  auto path = detail::propagate(cm, mu, V, sol.x0, N);
  sol.periodicity_error = (path.back() - path.front()).norm();
  path.pop_back();
  sol.X = std::move(path);
  for (int k = 0; k < N; ++k) {
    double th = kTwoPi * k / N;
    sol.theta.push_back(th);
    Eigen::Vector2d d = mu * cm.lam(th) * sol.X[k];
    if (V) d += V(th);
    sol.dX.push_back(d);
  }
  sol.residual = detail::spectral_residual(sol.X, sol.dX);
  return sol;
}

inline PeriodicSolution periodic_solve(double m, const PeriodicProfile& P, double mu, const Forcing& V, int N = 256) {
  return periodic_solve(CoefficientMatrices(m, P), mu, V, N);
}

}  // namespace bendkit
