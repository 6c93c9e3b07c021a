#pragma once

#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "series.hpp"

namespace bendkit {

enum class CoeffKind { A, B };

// A^n_beta = prod [k(n+2)-1][k(n+2)],  B^n_beta = prod [k(n+2)][k(n+2)+1]
inline Integer coeff(CoeffKind kind, int n, int beta) {
  if (n < 0 || beta < 0) throw Error(ErrorKind::InvalidArgument, "coeff needs n, beta >= 0");
  Integer r = 1;
  for (int k = 1; k <= beta; ++k) {
    long base = static_cast<long>(k) * (n + 2);
    if (kind == CoeffKind::A)
      r *= Integer(base - 1) * Integer(base);
    else
      r *= Integer(base) * Integer(base + 1);
  }
  return r;
}

// D f = z^{-m} f''
inline UnivariateSeries D_op(const UnivariateSeries& f, int m) {
  UnivariateSeries d2 = f.derivative().derivative();
  for (auto& [k, v] : d2.coeffs()) {
    if (k >= m) break;
    throw NotDivisible(k);
  }
  return d2.shifted(-m);
}

struct GeneratorQuad {
  UnivariateSeries h1, h2, h3, h4;

  int trunc() const { return std::min({h1.trunc(), h2.trunc(), h3.trunc(), h4.trunc()}); }
  bool operator==(const GeneratorQuad& o) const {
    return h1 == o.h1 && h2 == o.h2 && h3 == o.h3 && h4 == o.h4;
  }
};

namespace detail {

inline Rational signed_power(int eps, int p) { return (p % 2 == 0 || eps == -1) ? 1 : -1; }

struct Chain {
  std::vector<UnivariateSeries> terms;  // D^p(base), p = 0..
  bool terminated = false;              // exact zero reached
};

// D-chain of base while p(n+2)+offset <= Ny
inline Chain d_chain(UnivariateSeries base, int m, int n, int offset, int Ny) {
  Chain c;
  for (int p = 0; p * (n + 2) + offset <= Ny; ++p) {
    if (base.is_zero() && base.exact()) {
      c.terminated = true;
      break;
    }
    c.terms.push_back(base);
    base = D_op(base, m);
  }
  if (base.is_zero() && base.exact()) c.terminated = true;
  return c;
}

}  // namespace detail

// w = sum_p [H1_p + x H2_p + y H3_p + x y H4_p] y^{p(n+2)}
inline BivariateSeries build_w(int m, int n, int eps, const GeneratorQuad& quad, int Ny) {
  if (m < 0 || n < 0) throw Error(ErrorKind::InvalidArgument, "m, n must be >= 0");
  if (eps != 1 && eps != -1) throw Error(ErrorKind::InvalidArgument, "eps must be +1 or -1");
  if (Ny < 1) throw Error(ErrorKind::InvalidArgument, "Ny must be >= 1");
  const int mp = m + 2;
  std::array<UnivariateSeries, 4> base = {
      quad.h1.compose_power(mp), quad.h2.compose_power(mp).shifted(1),
      quad.h3.compose_power(mp), quad.h4.compose_power(mp).shifted(1)};
  std::array<detail::Chain, 4> chains;
  int tx = kExact;
  bool all_terminated = true;
  for (int i = 0; i < 4; ++i) {
    chains[i] = detail::d_chain(base[i], m, n, i < 2 ? 0 : 1, Ny);
    all_terminated = all_terminated && chains[i].terminated;
    for (auto& t : chains[i].terms) tx = std::min(tx, t.trunc());
  }
  if (tx < 0) throw Error(ErrorKind::InvalidArgument, "generator truncation too small for Ny");
  BivariateSeries w(tx, all_terminated ? kExact : Ny);
  for (int i = 0; i < 4; ++i) {
    const int offset = i < 2 ? 0 : 1;
    const CoeffKind kind = i < 2 ? CoeffKind::A : CoeffKind::B;
    for (int p = 0; p < static_cast<int>(chains[i].terms.size()); ++p) {
      Rational scale = detail::signed_power(eps, p) / Rational(coeff(kind, n, p));
      w.add_slice(p * (n + 2) + offset, chains[i].terms[p] * scale);
    }
  }
  return w;
}

// alpha_k = -eps/(k(k-1)) D alpha_{k-(n+2)}, alpha_2..alpha_{n+1} = 0
inline std::vector<UnivariateSeries> alpha_recursion(int m, int n, int eps, const UnivariateSeries& a0,
                                                     const UnivariateSeries& a1, int K) {
  if (m < 0 || n < 0) throw Error(ErrorKind::InvalidArgument, "m, n must be >= 0");
  std::vector<UnivariateSeries> a;
  a.push_back(a0);
  if (K >= 1) a.push_back(a1);
  for (int k = 2; k <= K; ++k) {
    if (k < n + 2) {
      a.emplace_back(std::min(a0.trunc(), a1.trunc()));
      continue;
    }
    Rational scale(-eps, k * (k - 1));
    scale.canonicalize();
    a.push_back(D_op(a[k - (n + 2)], m) * scale);
  }
  return a;
}

inline BivariateSeries assemble_alpha(const std::vector<UnivariateSeries>& alpha) {
  int tx = kExact;
  for (auto& s : alpha) tx = std::min(tx, s.trunc());
  BivariateSeries w(tx, static_cast<int>(alpha.size()) - 1);
  for (int k = 0; k < static_cast<int>(alpha.size()); ++k) w.add_slice(k, alpha[k]);
  return w;
}

// x^m w_yy + eps y^n w_xx on the trusted box
inline BivariateSeries pde_residual(const BivariateSeries& w, int m, int n, int eps) {
  BivariateSeries a = w.diff_y().diff_y().times_monomial(m, 0);
  BivariateSeries b = w.diff_x().diff_x().times_monomial(0, n, Rational(eps));
  return a + b;
}

inline double radius_constant(int m, int n) {
  auto c = [](int k) { return std::pow((k + 1.0) / (4.0 * (k + 2.0)), 1.0 / (k + 2.0)); };
  return std::min(c(m), c(n));
}

struct ScalingTriple {
  double P = 1, Q = 1, lam = 1;
};

inline ScalingTriple scaling_triple(int m, int n) {
  if (m < 0 || n < 0) throw Error(ErrorKind::InvalidArgument, "m, n must be >= 0");
  const double a = (m + 2.0) * (m + 1.0), b = (n + 2.0) * (n + 1.0);
  ScalingTriple s;
  if (m * n != 4) {
    const double d = m * n - 4.0;
    s.P = std::pow(a, n / d) * std::pow(b, 2.0 / d);
    s.Q = std::pow(b, m / d) * std::pow(a, 2.0 / d);
    s.lam = 1;
  } else {
    s.P = 1;
    s.Q = std::pow(b / a, 1.0 / (n + 2));
    s.lam = 1.0 / (a * s.Q * s.Q);
  }
  return s;
}

struct RationalScaling {
  Rational P, Q, lam;
};

// exact k-th root of a positive rational, if it exists
inline std::optional<Rational> rational_root(const Rational& q, int k) {
  if (q <= 0 || k < 1) return std::nullopt;
  Integer rn, rd;
  Integer num = q.get_num(), den = q.get_den();
  if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), k)) return std::nullopt;
  if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), k)) return std::nullopt;
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

inline Rational rational_pow(const Rational& q, int e) {
  Rational r = 1;
  Rational b = e >= 0 ? q : Rational(1 / q);
  for (int i = 0; i < std::abs(e); ++i) r *= b;
  return r;
}

// Rational (P,Q,lam) with P^m = lam a Q^2 and Q^n = lam b P^2, when one exists.
// The closed form is preferred; otherwise Q^{n+2}/P^{m+2} = b/a is solved through
// a Bezout identity on the reduced exponents.
inline std::optional<RationalScaling> exact_scaling(int m, int n) {
  const Rational a((m + 2) * (m + 1)), b((n + 2) * (n + 1));
  auto finish = [&](const Rational& P, const Rational& Q) {
    RationalScaling s{P, Q, rational_pow(P, m) / (a * Q * Q)};
    s.lam.canonicalize();
    return s;
  };
  if (m * n != 4) {
    const int d = m * n - 4;
    Rational pn = rational_pow(a, n) * b * b, qn = rational_pow(b, m) * a * a;
    auto P = d > 0 ? rational_root(pn, d) : rational_root(1 / pn, -d);
    auto Q = d > 0 ? rational_root(qn, d) : rational_root(1 / qn, -d);
    if (P && Q) return finish(*P, *Q);
  } else if (auto Q = rational_root(b / a, n + 2)) {
    return finish(Rational(1), *Q);
  }
  const int g = std::gcd(m + 2, n + 2);
  auto sigma = rational_root(b / a, g);
  if (!sigma) return std::nullopt;
  const int mr = (m + 2) / g, nr = (n + 2) / g;
  // nr*y - mr*x = 1
  for (int y = 0; y <= mr; ++y) {
    if ((nr * y - 1) % mr == 0) {
      int x = (nr * y - 1) / mr;
      return finish(rational_pow(*sigma, x), rational_pow(*sigma, y));
    }
  }
  return std::nullopt;
}

struct RecoveredBending {
  // (x,y) frame: u_hat, v_hat, w
  BivariateSeries u_hat, v_hat, w_hat;
  ScalingTriple scaling;
  std::optional<RationalScaling> exact;
  // (s,t) frame, present when the scaling is rational
  std::optional<std::array<BivariateSeries, 3>> st;
  // double coefficients in (s,t), always present
  std::array<std::map<Exponent2, double>, 3> st_double;
};

// residuals of the three linear bending equations for z = s^{m+2} + eps t^{n+2}
inline std::array<BivariateSeries, 3> smn_linear_residual(const BivariateSeries& u, const BivariateSeries& v,
                                                          const BivariateSeries& w, int m, int n, int eps) {
  BivariateSeries zs_ws = w.diff_x().times_monomial(m + 1, 0, Rational(m + 2));
  BivariateSeries zt_wt = w.diff_y().times_monomial(0, n + 1, Rational(eps * (n + 2)));
  BivariateSeries zs_wt = w.diff_y().times_monomial(m + 1, 0, Rational(m + 2));
  BivariateSeries zt_ws = w.diff_x().times_monomial(0, n + 1, Rational(eps * (n + 2)));
  return {u.diff_x() + zs_ws, u.diff_y() + v.diff_x() + zs_wt + zt_ws, v.diff_y() + zt_wt};
}

inline RecoveredBending recover_bending(const BivariateSeries& W, int m, int n, int eps) {
  const Rational a((m + 2) * (m + 1)), b((n + 2) * (n + 1));
  BivariateSeries Wx = W.diff_x(), Wy = W.diff_y();
  BivariateSeries u0 = -Wx.times_monomial(m + 1, 0, Rational(m + 2)).integrate_x();
  BivariateSeries v0 = -Wy.times_monomial(0, n + 1, Rational(eps * (n + 2))).integrate_y();
  BivariateSeries rest = u0.diff_y() + Wy.times_monomial(m + 1, 0, Rational(m + 2)) +
                         (v0.diff_x() + Wx.times_monomial(0, n + 1, Rational(eps * (n + 2)))) * (a / b);
  // rest must split as R1(x) + R2(y); g' = -R2 (no constant), k' = -(b/a) R1
  BivariateSeries gp(kExact, rest.trunc_y()), kp(rest.trunc_x(), kExact);
  for (auto& [e, c] : rest.coeffs()) {
    if (e.first > 0 && e.second > 0)
      throw Error(ErrorKind::CompatibilityFailure,
                  "middle equation leaves mixed term x^" + std::to_string(e.first) + " y^" +
                      std::to_string(e.second));
    if (e.second > 0)
      gp.set(0, e.second, -c);
    else
      kp.set(e.first, 0, -c * b / a);
  }
  RecoveredBending r;
  r.u_hat = u0 + gp.integrate_y();
  r.v_hat = v0 + kp.integrate_x();
  r.w_hat = W;
  auto res = smn_linear_residual(r.u_hat, r.v_hat, r.w_hat, m, n, eps);
  // (x,y) frame carries the factor a/b on the middle equation
  res[1] = r.u_hat.diff_y() + W.diff_y().times_monomial(m + 1, 0, Rational(m + 2)) +
           (r.v_hat.diff_x() + W.diff_x().times_monomial(0, n + 1, Rational(eps * (n + 2)))) * (a / b);
  for (int i = 0; i < 3; ++i)
    if (!res[i].is_zero())
      throw Error(ErrorKind::CompatibilityFailure,
                  "recovered field fails linear equation " + std::to_string(i + 1));

  r.scaling = scaling_triple(m, n);
  r.exact = exact_scaling(m, n);
  if (r.exact) {
    const Rational& P = r.exact->P;
    const Rational& Q = r.exact->Q;
    r.scaling = {P.get_d(), Q.get_d(), r.exact->lam.get_d()};
    auto pull = [&](const BivariateSeries& f, const Rational& pre) {
      BivariateSeries out(f.trunc_x(), f.trunc_y());
      for (auto& [e, c] : f.coeffs()) out.set(e.first, e.second, c * pre * rational_pow(P, e.first) * rational_pow(Q, e.second));
      return out;
    };
    r.st = std::array<BivariateSeries, 3>{pull(r.u_hat, rational_pow(P, -(m + 1))),
                                          pull(r.v_hat, rational_pow(Q, -(n + 1))), pull(W, Rational(1))};
  }
  const double P = r.scaling.P, Q = r.scaling.Q;
  const std::array<const BivariateSeries*, 3> src = {&r.u_hat, &r.v_hat, &W};
  const std::array<double, 3> pre = {std::pow(P, -(m + 1)), std::pow(Q, -(n + 1)), 1.0};
  for (int i = 0; i < 3; ++i) {
    if (r.st) {
      for (auto& [e, c] : (*r.st)[i].coeffs()) r.st_double[i][e] = c.get_d();
    } else {
      for (auto& [e, c] : src[i]->coeffs())
        r.st_double[i][e] = c.get_d() * pre[i] * std::pow(P, e.first) * std::pow(Q, e.second);
    }
  }
  return r;
}

// h^i from the y^0 and y^1 slices, checked by regenerating w
inline GeneratorQuad extract_generators(const BivariateSeries& w, int m, int n, int eps) {
  const int mp = m + 2;
  const int tx = w.trunc_x();
  const int ht = tx == kExact ? kExact : (tx - 1) / mp;
  if (ht < 0) throw Error(ErrorKind::InvalidArgument, "x truncation too small to read generators");
  GeneratorQuad q{UnivariateSeries(ht), UnivariateSeries(ht), UnivariateSeries(ht), UnivariateSeries(ht)};
  for (int j = 0; j < 2; ++j) {
    UnivariateSeries alpha = w.slice_y(j);
    UnivariateSeries& even = j == 0 ? q.h1 : q.h3;
    UnivariateSeries& odd = j == 0 ? q.h2 : q.h4;
    for (auto& [k, c] : alpha.coeffs()) {
      if (k % mp == 0)
        even.set(k / mp, c);
      else if (k % mp == 1)
        odd.set((k - 1) / mp, c);
      else
        throw NotInSolutionForm(k, j, "exponent residue " + std::to_string(k % mp) + " mod " + std::to_string(mp));
    }
  }
  int Ny = w.trunc_y();
  if (Ny == kExact) {
    int dx = std::max(w.max_degree_x(), 0);
    Ny = std::max(w.max_degree_y(), 1) + (dx / mp + 2) * (n + 2) + 1;
  }
  if (Ny < 1) Ny = 1;
  BivariateSeries regen = build_w(m, n, eps, q, Ny);
  int bx = std::min(regen.trunc_x(), w.trunc_x()), by = std::min(regen.trunc_y(), w.trunc_y());
  BivariateSeries diff = w.restricted(bx, by) - regen.restricted(bx, by);
  if (!diff.is_zero()) {
    auto e = diff.coeffs().begin()->first;
    throw NotInSolutionForm(e.first, e.second, "differs from the solution generated by its y^0 and y^1 slices");
  }
  return q;
}

}  // namespace bendkit
