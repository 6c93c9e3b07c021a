#pragma once

#include <limits>
#include <numbers>
#include <optional>

#include "polar.hpp"
#include "spectrum.hpp"
#include "surface.hpp"

namespace bendkit {

struct BendingOptions {
  int order = 1;        // l
  double smooth = 0;    // every r-exponent must be >= smooth
  int p = 0;            // eigenvalue index j; 0 selects automatically
  char tag = '-';
  int samples = 256;
  double lambda_max = 0;  // 0 derives the search window from the asymptotics
  int window = 8;
  double tol = 1e-6;
  bool enforce_nonresonance = true;  // false: rely on periodic_solve conditioning alone
};

struct BendingConstruction {
  double lambda_p = 0;
  int p = 0;
  char tag = '-';
  int multiplicity = 1;
  std::vector<PolarField> fields;  // U^1 .. U^l
  BInvariants b;
  NonresonanceReport nonresonance;
  double min_exponent = 0;
  std::vector<double> forced_mu;   // exponents passed to periodic_solve
  double max_solve_residual = 0;
  double max_periodicity_error = 0;
};

namespace detail {

// per-sample geometry of z = r^m P
struct PolarGrid {
  int N;
  std::vector<double> th, C, S, P, P1, a, b, c;

  PolarGrid(const CoefficientMatrices& cm, int n) : N(n) {
    const PeriodicProfile& prof = cm.profile();
    PeriodicProfile d1 = prof.derivative(), d2 = d1.derivative();
    for (int k = 0; k < N; ++k) {
      double t = kTwoPi * k / N;
      th.push_back(t);
      C.push_back(std::cos(t));
      S.push_back(std::sin(t));
      P.push_back(prof(t));
      P1.push_back(d1(t));
      HessianCoeffs h = polar_hessian(cm.m(), P.back(), P1.back(), d2(t), t);
      a.push_back(h.zss);
      b.push_back(h.zst);
      c.push_back(h.ztt);
    }
  }
};

// forcing of the rho-frame system for sources r^{mu-1}(f,g,h)
inline Eigen::Vector2d forcing_at(const CoefficientMatrices& cm, double mu, double th, double f, double g, double h) {
  double p = cm.P(th), p1 = cm.P1(th);
  HessianCoeffs hc = polar_hessian(cm.m(), p, p1, cm.P2(th), th);
  const double a = hc.zss, b = hc.zst, c = hc.ztt, C = std::cos(th), S = std::sin(th);
  Eigen::Matrix2d M;
  M << -c * S, -a * C, (a + c) * C + 2 * b * S, -(a + c) * S - 2 * b * C;
  Eigen::Vector2d q(c * f - a * h, (a + c) * g - 2 * b * (f + h));
  return std::pow(p, -mu / cm.m()) * M.inverse() * q;
}

struct Components {
  PeriodicProfile alpha, beta, gamma;
};

// (u, v, w) profiles from phi = r^mu Y1, psi = r^mu Y2 with Y = P^{mu/m} X
inline Components assemble(const PolarGrid& G, double m, double mu, const std::vector<Eigen::Vector2d>& X,
                           const std::vector<Eigen::Vector2d>& dX, const std::vector<double>& fh) {
  std::vector<double> al(G.N), be(G.N), ga(G.N);
  for (int k = 0; k < G.N; ++k) {
    double w = std::pow(G.P[k], mu / m);
    Eigen::Vector2d Y = w * X[k];
    Eigen::Vector2d dY = w * (dX[k] + (mu / m) * (G.P1[k] / G.P[k]) * X[k]);
    const double C = G.C[k], S = G.S[k];
    double div = mu * C * Y(0) - S * dY(0) + mu * S * Y(1) + C * dY(1) - fh[k];
    double gam = div / (G.a[k] + G.c[k]);
    ga[k] = gam;
    al[k] = Y(0) - (m * C * G.P[k] - S * G.P1[k]) * gam;
    be[k] = Y(1) - (m * S * G.P[k] + C * G.P1[k]) * gam;
  }
  return {PeriodicProfile::from_samples(al).trimmed(1e-16), PeriodicProfile::from_samples(be).trimmed(1e-16),
          PeriodicProfile::from_samples(ga).trimmed(1e-16)};
}

inline PeriodicProfile term_profile(const PolarFunction& f, double exponent) {
  for (auto& t : f.terms())
    if (PolarFunction::same_exponent(t.exponent, exponent)) return t.profile;
  return PeriodicProfile();
}

struct FieldDerivs {
  PolarFunction us, ut, vs, vt, ws, wt;
};

inline FieldDerivs derivs(const PolarField& U) {
  return {U.u.d_s(), U.u.d_t(), U.v.d_s(), U.v.d_t(), U.w.d_s(), U.w.d_t()};
}

inline void construct(const CoefficientMatrices& cm, double lambda, const BendingOptions& o, BendingConstruction& out) {
  const double m = cm.m();
  PolarGrid G(cm, o.samples);
  // order 1: periodic eigenfunction of X' = lambda Lambda X
  Eigen::Matrix2d Phi = monodromy(cm, lambda);
  Eigen::Vector2d x0(1, 0);
  if ((Phi - Eigen::Matrix2d::Identity()).norm() >= 1e-6) {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(Phi - Eigen::Matrix2d::Identity(), Eigen::ComputeFullV);
    x0 = svd.matrixV().col(1);
  }
  auto path = propagate(cm, lambda, nullptr, x0, G.N);
  out.max_periodicity_error = (path.back() - path.front()).norm() / path.front().norm();
  path.pop_back();
  std::vector<Eigen::Vector2d> dX;
  for (int k = 0; k < G.N; ++k) dX.push_back(lambda * cm.lam(G.th[k]) * path[k]);
  Components c1 = assemble(G, m, lambda, path, dX, std::vector<double>(G.N, 0.0));
  double scale = 0;
  for (auto& pr : {&c1.alpha, &c1.beta})
    for (double v : pr->sample(G.N)) scale = std::max(scale, std::abs(v));
  scale = 1 / scale;
  PolarField U1{PolarFunction(lambda, c1.alpha * scale), PolarFunction(lambda, c1.beta * scale),
                PolarFunction(lambda + 1 - m, c1.gamma * scale)};
  out.fields.push_back(U1);
  std::vector<FieldDerivs> D{derivs(U1)};
  for (int j = 2; j <= o.order; ++j) {
    PolarFunction F, Gf, H;
    for (int i = 1; i <= j - 1; ++i) {
      const FieldDerivs& A = D[j - i - 1];
      const FieldDerivs& B = D[i - 1];
      F = F - (A.us * B.us + A.vs * B.vs + A.ws * B.ws);
      Gf = Gf - (B.us * A.ut + B.vs * A.vt + B.ws * A.wt + B.ut * A.us + B.vt * A.vs + B.wt * A.ws);
      H = H - (A.ut * B.ut + A.vt * B.vt + A.wt * B.wt);
    }
    std::vector<double> kappas;
    for (const PolarFunction* src : {&F, &Gf, &H})
      for (auto& t : src->terms()) {
        bool seen = false;
        for (double k : kappas) seen = seen || PolarFunction::same_exponent(k, t.exponent);
        if (!seen) kappas.push_back(t.exponent);
      }
    std::sort(kappas.begin(), kappas.end());
    PolarField Uj;
    for (double kappa : kappas) {
      PeriodicProfile f = term_profile(F, kappa), g = term_profile(Gf, kappa), h = term_profile(H, kappa);
      const double mu = kappa + 1;
      Forcing V = [&cm, mu, f, g, h](double th) { return forcing_at(cm, mu, th, f(th), g(th), h(th)); };
      PeriodicSolution sol;
      try {
        sol = periodic_solve(cm, mu, V, G.N);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ResonantForcing) throw;
        throw ResonantExponent(mu, "forced exponent " + std::to_string(mu) + " at order " + std::to_string(j) +
                                       " lies in the spectrum");
      }
      out.forced_mu.push_back(mu);
      out.max_solve_residual = std::max(out.max_solve_residual, sol.residual);
      out.max_periodicity_error =
          std::max(out.max_periodicity_error, sol.periodicity_error / std::max(1.0, sol.X.front().norm()));
      std::vector<double> fh(G.N);
      for (int k = 0; k < G.N; ++k) fh[k] = f(G.th[k]) + h(G.th[k]);
      Components cj = assemble(G, m, mu, sol.X, sol.dX, fh);
      Uj.u.add(mu, cj.alpha);
      Uj.v.add(mu, cj.beta);
      Uj.w.add(mu + 1 - m, cj.gamma);
    }
    out.fields.push_back(Uj);
    D.push_back(derivs(Uj));
  }
  out.min_exponent = std::numeric_limits<double>::infinity();
  for (auto& U : out.fields) out.min_exponent = std::min(out.min_exponent, U.min_exponent());
}

}  // namespace detail

// smallest r-exponent over U^1..U^l for eigenvalue lambda: min(lambda+1-m, l lambda + l - (2l-1) m)
inline double predicted_min_exponent(double lambda, double m, int l) {
  return std::min(lambda + 1 - m, l * lambda + l - (2 * l - 1) * m);
}

inline BendingConstruction build_bending(double m, const PeriodicProfile& P, const BendingOptions& o = {}) {
  check_homogeneous(m, P);
  if (o.order < 1) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
  CurvatureMargin cmg = curvature_margin(m, P);
  if (!(cmg.margin > 0)) throw Error(ErrorKind::CurvatureViolation, "curvature margin is not positive");
  BendingConstruction out;
  out.b = b_invariants(m, P);
  out.nonresonance = nonresonance(out.b.b1, out.b.b2, m, o.order, o.window, o.tol);
  if (o.order >= 2 && !out.nonresonance.pass && o.enforce_nonresonance) {
    double x = out.b.b1 - out.b.b2;
    throw ResonantExponent(x, out.nonresonance.collision);
  }
  CoefficientMatrices cm(m, P);
  const double spacing = std::numbers::pi / out.b.b1;
  double need = std::max({o.smooth + m - 1, (o.smooth - o.order + (2 * o.order - 1) * m) / o.order, m});
  double lmax = o.lambda_max > 0 ? o.lambda_max : need + 8 * spacing;
  if (o.p > 0) lmax = std::max(lmax, asymptotic_eigenvalue(o.p + 2, out.b.b1, out.b.b2));
  auto seq = floquet_sequence(cm, out.b.b1, lmax);
  std::vector<FloquetEigenvalue> cands;
  for (auto& e : seq) {
    if (!e.periodic) continue;
    if (o.p > 0) {
      if (e.j == o.p && e.tag == o.tag) cands.push_back(e);
      continue;
    }
    if (e.multiplicity == 2 && e.tag == '+') continue;
    if (e.value <= std::max(1.0, m) + 1e-6) continue;
    if (predicted_min_exponent(e.value, m, o.order) < o.smooth) continue;
    cands.push_back(e);
  }
  if (o.p > 0 && cands.empty())
    throw Error(ErrorKind::InvalidArgument, "no periodic eigenvalue with index " + std::to_string(o.p) + o.tag);
  std::optional<ResonantExponent> last;
  for (auto& e : cands) {
    BendingConstruction trial = out;
    trial.lambda_p = e.value;
    trial.p = e.j;
    trial.tag = e.tag;
    trial.multiplicity = e.multiplicity;
    try {
      detail::construct(cm, e.value, o, trial);
    } catch (const ResonantExponent& r) {
      last = r;
      if (o.p > 0) throw;
      continue;
    }
    if (trial.min_exponent < o.smooth && o.p == 0) continue;
    return trial;
  }
  if (last) throw *last;
  throw Error(ErrorKind::SmoothnessUnreachable,
              "no periodic eigenvalue up to " + std::to_string(lmax) + " gives exponents >= " + std::to_string(o.smooth));
}

inline std::vector<VectorField3> to_fields(const std::vector<PolarField>& fields) {
  std::vector<VectorField3> out;
  for (auto& f : fields) out.push_back(VectorField3::polar(f));
  return out;
}

}  // namespace bendkit
