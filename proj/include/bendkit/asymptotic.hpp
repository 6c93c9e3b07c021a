#pragma once

#include <complex>
#include <span>

#include "bending.hpp"

namespace bendkit {

using cplx = std::complex<double>;
using CVec3 = Eigen::Vector3cd;

struct AsymptoticData {
  double g = 0;
  cplx lambda = 0;  // L = g d/ds + lambda d/dt
};

struct VekuaCoefficients {
  cplx A = 0, B = 0, C = 0, M = 0;
};

namespace detail {

inline cplx bdot(const CVec3& a, const CVec3& b) { return a(0) * b(0) + a(1) * b(1) + a(2) * b(2); }
inline CVec3 cvec(const Vec3& v) { return v.cast<cplx>(); }
// bilinear cross product; Eigen's cross conjugates complex results
inline CVec3 bcross(const CVec3& a, const CVec3& b) {
  return CVec3(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

inline double curvature_tol(const FormData& d, double tol) {
  return tol * std::max(1.0, d.e * d.e + d.f * d.f + d.g * d.g);
}

// second form, its first partials, and L applied to R
struct AsymptoticJet {
  SurfaceJet R;
  FormData form;
  double g = 0, g_s = 0, g_t = 0;
  cplx lam = 0, lam_s = 0, lam_t = 0;
  CVec3 LR, LR_s, LR_t, L2R, LbarR;
};

inline AsymptoticJet asymptotic_jet(const ParametricSurface& surface, double s, double t) {
  AsymptoticJet a;
  const SurfaceJet& j = a.R = surface.jet(s, t);
  const FormData& d = a.form = form_data_from_jet(j);
  const Vec3& N = d.N;
  const double al = d.areaElem;
  Vec3 n_s = j.Rss.cross(j.Rt) + j.Rs.cross(j.Rst);
  Vec3 n_t = j.Rst.cross(j.Rt) + j.Rs.cross(j.Rtt);
  Vec3 N_s = (n_s - N * N.dot(n_s)) / al;
  Vec3 N_t = (n_t - N * N.dot(n_t)) / al;
  double e_s = j.Rsss.dot(N) + j.Rss.dot(N_s), e_t = j.Rsst.dot(N) + j.Rss.dot(N_t);
  double f_s = j.Rsst.dot(N) + j.Rst.dot(N_s), f_t = j.Rstt.dot(N) + j.Rst.dot(N_t);
  double g_s = j.Rstt.dot(N) + j.Rtt.dot(N_s), g_t = j.Rttt.dot(N) + j.Rtt.dot(N_t);
  double D = d.e * d.g - d.f * d.f;
  if (D < -curvature_tol(d, 1e-10)) throw Error(ErrorKind::NegativeCurvature, "eg - f^2 < 0");
  double q = std::sqrt(std::max(D, 0.0));
  a.g = d.g;
  a.g_s = g_s;
  a.g_t = g_t;
  a.lam = cplx(-d.f, q);
  if (q > 0) {
    double D_s = e_s * d.g + d.e * g_s - 2 * d.f * f_s;
    double D_t = e_t * d.g + d.e * g_t - 2 * d.f * f_t;
    a.lam_s = cplx(-f_s, D_s / (2 * q));
    a.lam_t = cplx(-f_t, D_t / (2 * q));
  } else {
    a.lam_s = cplx(-f_s, 0);
    a.lam_t = cplx(-f_t, 0);
  }
  CVec3 Rs = cvec(j.Rs), Rt = cvec(j.Rt);
  a.LR = a.g * Rs + a.lam * Rt;
  a.LR_s = a.g_s * Rs + a.g * cvec(j.Rss) + a.lam_s * Rt + a.lam * cvec(j.Rst);
  a.LR_t = a.g_t * Rs + a.g * cvec(j.Rst) + a.lam_t * Rt + a.lam * cvec(j.Rtt);
  a.L2R = a.g * a.LR_s + a.lam * a.LR_t;
  a.LbarR = a.g * Rs + std::conj(a.lam) * Rt;
  return a;
}

}  // namespace detail

inline AsymptoticData asymptotic_data(const ParametricSurface& surface, double s, double t, double tol = 1e-10) {
  FormData d = fundamental_data(surface, s, t);
  double D = d.e * d.g - d.f * d.f;
  if (D < -detail::curvature_tol(d, tol)) throw Error(ErrorKind::NegativeCurvature, "eg - f^2 < 0");
  return {d.g, cplx(-d.f, std::sqrt(std::max(D, 0.0)))};
}

// closed form of C: -4 g^2 (eg - f^2) |R_s x R_t|^2
inline double vekua_C_closed_form(const ParametricSurface& surface, double s, double t) {
  FormData d = fundamental_data(surface, s, t);
  return -4 * d.g * d.g * (d.e * d.g - d.f * d.f) * d.areaElem * d.areaElem;
}

namespace detail {

inline VekuaCoefficients vekua_from_jet(const AsymptoticJet& a, const SourceTerms& src) {
  CVec3 X = bcross(a.LR, a.LbarR);
  VekuaCoefficients v;
  v.A = bdot(X, bcross(a.L2R, a.LbarR));
  v.B = bdot(X, bcross(a.L2R, a.LR));
  v.C = bdot(X, X);
  v.M = a.g * a.g * src.F + a.g * a.lam * src.G + a.lam * a.lam * src.H;
  double al2 = a.form.areaElem * a.form.areaElem;
  if (std::abs(v.C) < 1e-12 * al2 * al2) throw Error(ErrorKind::FlatPointDegeneracy, "|C| below threshold");
  return v;
}

}  // namespace detail

inline VekuaCoefficients vekua_coefficients(const ParametricSurface& surface, std::span<const VectorField3> fields,
                                            int j, double s, double t) {
  auto a = detail::asymptotic_jet(surface, s, t);
  return detail::vekua_from_jet(a, rhs_terms(fields, j, s, t));
}

// C L h - A h + B conj(h) - C M with h = LR . U^j
inline cplx vekua_residual(const ParametricSurface& surface, std::span<const VectorField3> fields, int j, double s,
                           double t) {
  if (j < 1 || static_cast<int>(fields.size()) < j)
    throw Error(ErrorKind::MissingLowerOrderFields, "vekua_residual needs U^1..U^j");
  auto a = detail::asymptotic_jet(surface, s, t);
  VekuaCoefficients v = detail::vekua_from_jet(a, rhs_terms(fields, j, s, t));
  FieldJet U = fields[j - 1].jet(s, t);
  using detail::bdot;
  using detail::cvec;
  cplx h = bdot(a.LR, cvec(U.U));
  cplx h_s = bdot(a.LR_s, cvec(U.U)) + bdot(a.LR, cvec(U.Us));
  cplx h_t = bdot(a.LR_t, cvec(U.U)) + bdot(a.LR, cvec(U.Ut));
  cplx Lh = a.g * h_s + a.lam * h_t;
  return v.C * Lh - v.A * h + v.B * std::conj(h) - v.C * v.M;
}

struct PhiPsi {
  cplx phi = 0, psi = 0;
};

inline cplx h_from_phi_psi(double g, cplx lambda, cplx phi, cplx psi) { return g * phi + lambda * psi; }

inline PhiPsi phi_psi_from_h(double g, cplx lambda, cplx h) {
  cplx dl = lambda - std::conj(lambda);
  double scale = std::abs(lambda) + std::abs(g);
  if (std::abs(dl) <= 1e-14 * scale || std::abs(g) <= 1e-14 * scale || scale == 0)
    throw Error(ErrorKind::SingularConversion, "lambda real or g zero");
  return {(lambda * std::conj(h) - std::conj(lambda) * h) / (dl * g), (h - std::conj(h)) / dl};
}

}  // namespace bendkit
