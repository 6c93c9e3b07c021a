#pragma once

#include <Eigen/Dense>
#include <array>
#include <cfloat>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "polar.hpp"
#include "poly2.hpp"

namespace bendkit {

using Vec3 = Eigen::Vector3d;

struct Point2 {
  double s = 0, t = 0;
};

struct Domain {
  enum class Kind { Rectangle, Annulus };
  Kind kind = Kind::Rectangle;
  // rectangle: [a0,a1] x [b0,b1]; annulus: a0 <= r <= a1
  double a0 = -1, a1 = 1, b0 = -1, b1 = 1;

  static Domain rectangle(double s0, double s1, double t0, double t1) {
    if (!(s1 > s0 && t1 > t0)) throw Error(ErrorKind::InvalidArgument, "empty rectangle");
    return {Kind::Rectangle, s0, s1, t0, t1};
  }
  static Domain annulus(double r0, double r1) {
    if (!(r1 > r0 && r0 >= 0)) throw Error(ErrorKind::InvalidArgument, "empty annulus");
    return {Kind::Annulus, r0, r1, 0, 2 * std::numbers::pi};
  }

  double scale() const {
    if (kind == Kind::Annulus) return 2 * a1;
    return std::max(a1 - a0, b1 - b0);
  }

  bool contains(double s, double t) const {
    if (kind == Kind::Annulus) {
      double r = std::hypot(s, t);
      return r >= a0 && r <= a1;
    }
    return s >= a0 && s <= a1 && t >= b0 && t <= b1;
  }

  // rectangle: tensor grid including the edges; annulus: n1 radii x n2 angles
  std::vector<Point2> grid(int n1, int n2) const {
    std::vector<Point2> pts;
    auto lin = [](double lo, double hi, int n, int i) { return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1); };
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        if (kind == Kind::Annulus) {
          double r = lin(a0, a1, n1, i), th = 2 * std::numbers::pi * j / n2;
          pts.push_back({r * std::cos(th), r * std::sin(th)});
        } else {
          pts.push_back({lin(a0, a1, n1, i), lin(b0, b1, n2, j)});
        }
      }
    return pts;
  }
};

// R and its partial derivatives up to order 3
struct SurfaceJet {
  Vec3 R, Rs, Rt, Rss, Rst, Rtt, Rsss, Rsst, Rstt, Rttt;
};

class ParametricSurface {
public:
  using JetFn = std::function<SurfaceJet(double, double)>;

  ParametricSurface(Domain domain, JetFn jet, bool analytic)
      : domain_(domain), jet_(std::move(jet)), analytic_(analytic) {}

  const Domain& domain() const { return domain_; }
  bool analytic() const { return analytic_; }
  SurfaceJet jet(double s, double t) const { return jet_(s, t); }
  Vec3 operator()(double s, double t) const { return jet_(s, t).R; }

  static ParametricSurface polynomial(const Poly2& x, const Poly2& y, const Poly2& z, Domain domain) {
    struct D {
      std::array<Poly2, 10> c[3];
    };
    auto d = std::make_shared<D>();
    const Poly2* src[3] = {&x, &y, &z};
    for (int k = 0; k < 3; ++k) {
      auto& c = d->c[k];
      c[0] = *src[k];
      c[1] = c[0].ds();
      c[2] = c[0].dt();
      c[3] = c[1].ds();
      c[4] = c[1].dt();
      c[5] = c[2].dt();
      c[6] = c[3].ds();
      c[7] = c[3].dt();
      c[8] = c[4].dt();
      c[9] = c[5].dt();
    }
    return ParametricSurface(
        domain,
        [d](double s, double t) {
          SurfaceJet j;
          Vec3* out[10] = {&j.R, &j.Rs, &j.Rt, &j.Rss, &j.Rst, &j.Rtt, &j.Rsss, &j.Rsst, &j.Rstt, &j.Rttt};
          for (int i = 0; i < 10; ++i) *out[i] = Vec3(d->c[0][i](s, t), d->c[1][i](s, t), d->c[2][i](s, t));
          return j;
        },
        true);
  }

  // graph (s, t, z(s,t))
  static ParametricSurface graph(const Poly2& z, Domain domain) {
    return polynomial(Poly2::monomial(1, 0), Poly2::monomial(0, 1), z, domain);
  }

  // graph of z = r^m P(theta)
  static ParametricSurface homogeneous(double m, const PeriodicProfile& P, Domain domain) {
    struct D {
      PolarFunction z[10];
    };
    auto d = std::make_shared<D>();
    auto& z = d->z;
    z[0] = PolarFunction(m, P);
    z[1] = z[0].d_s();
    z[2] = z[0].d_t();
    z[3] = z[1].d_s();
    z[4] = z[1].d_t();
    z[5] = z[2].d_t();
    z[6] = z[3].d_s();
    z[7] = z[3].d_t();
    z[8] = z[4].d_t();
    z[9] = z[5].d_t();
    return ParametricSurface(
        domain,
        [d](double s, double t) {
          const double r = std::hypot(s, t), th = std::atan2(t, s);
          SurfaceJet j;
          Vec3* out[10] = {&j.R, &j.Rs, &j.Rt, &j.Rss, &j.Rst, &j.Rtt, &j.Rsss, &j.Rsst, &j.Rstt, &j.Rttt};
          for (int i = 0; i < 10; ++i) *out[i] = Vec3(0, 0, d->z[i].value_polar(r, th));
          j.R.x() = s;
          j.R.y() = t;
          j.Rs.x() = 1;
          j.Rt.y() = 1;
          return j;
        },
        true);
  }

  // central differences with step h (default 1e-4 * domain scale); third
  // derivatives use a wider stencil k = 20 h
  static ParametricSurface from_function(std::function<Vec3(double, double)> R, Domain domain, double h = 0) {
    if (h <= 0) h = 1e-4 * domain.scale();
    const double k = 20 * h;
    return ParametricSurface(
        domain,
        [R, h, k](double s, double t) {
          SurfaceJet j;
          Vec3 c = R(s, t);
          Vec3 sp = R(s + h, t), sm = R(s - h, t), tp = R(s, t + h), tm = R(s, t - h);
          j.R = c;
          j.Rs = (sp - sm) / (2 * h);
          j.Rt = (tp - tm) / (2 * h);
          j.Rss = (sp - 2 * c + sm) / (h * h);
          j.Rtt = (tp - 2 * c + tm) / (h * h);
          j.Rst = (R(s + h, t + h) - R(s + h, t - h) - R(s - h, t + h) + R(s - h, t - h)) / (4 * h * h);
          j.Rsss = (R(s + 2 * k, t) - 2 * R(s + k, t) + 2 * R(s - k, t) - R(s - 2 * k, t)) / (2 * k * k * k);
          j.Rttt = (R(s, t + 2 * k) - 2 * R(s, t + k) + 2 * R(s, t - k) - R(s, t - 2 * k)) / (2 * k * k * k);
          auto d2s = [&](double tt) { return (R(s + k, tt) - 2 * R(s, tt) + R(s - k, tt)) / (k * k); };
          auto d2t = [&](double ss) { return (R(ss, t + k) - 2 * R(ss, t) + R(ss, t - k)) / (k * k); };
          j.Rsst = (d2s(t + k) - d2s(t - k)) / (2 * k);
          j.Rstt = (d2t(s + k) - d2t(s - k)) / (2 * k);
          return j;
        },
        false);
  }

private:
  Domain domain_;
  JetFn jet_;
  bool analytic_;
};

struct FieldJet {
  Vec3 U = Vec3::Zero(), Us = Vec3::Zero(), Ut = Vec3::Zero();
};

class VectorField3 {
public:
  using Fn = std::function<FieldJet(double, double)>;

  VectorField3() : fn_([](double, double) { return FieldJet{}; }) {}
  explicit VectorField3(Fn fn) : fn_(std::move(fn)) {}

  FieldJet jet(double s, double t) const { return fn_(s, t); }
  Vec3 operator()(double s, double t) const { return fn_(s, t).U; }

  static VectorField3 zero() { return VectorField3(); }

  static VectorField3 polynomial(const Poly2& u, const Poly2& v, const Poly2& w) {
    auto c = std::make_shared<std::array<Poly2, 9>>(
        std::array<Poly2, 9>{u, v, w, u.ds(), v.ds(), w.ds(), u.dt(), v.dt(), w.dt()});
    return VectorField3([c](double s, double t) {
      auto& p = *c;
      return FieldJet{Vec3(p[0](s, t), p[1](s, t), p[2](s, t)), Vec3(p[3](s, t), p[4](s, t), p[5](s, t)),
                      Vec3(p[6](s, t), p[7](s, t), p[8](s, t))};
    });
  }

  static VectorField3 polar(const PolarField& f) {
    auto c = std::make_shared<std::array<PolarFunction, 9>>(std::array<PolarFunction, 9>{
        f.u, f.v, f.w, f.u.d_s(), f.v.d_s(), f.w.d_s(), f.u.d_t(), f.v.d_t(), f.w.d_t()});
    return VectorField3([c](double s, double t) {
      const double r = std::hypot(s, t), th = std::atan2(t, s);
      auto& p = *c;
      auto e = [&](int i) { return p[i].value_polar(r, th); };
      return FieldJet{Vec3(e(0), e(1), e(2)), Vec3(e(3), e(4), e(5)), Vec3(e(6), e(7), e(8))};
    });
  }

  VectorField3 operator+(const VectorField3& o) const {
    auto a = fn_, b = o.fn_;
    return VectorField3([a, b](double s, double t) {
      FieldJet x = a(s, t), y = b(s, t);
      return FieldJet{x.U + y.U, x.Us + y.Us, x.Ut + y.Ut};
    });
  }
  VectorField3 operator*(double c) const {
    auto a = fn_;
    return VectorField3([a, c](double s, double t) {
      FieldJet x = a(s, t);
      return FieldJet{c * x.U, c * x.Us, c * x.Ut};
    });
  }

private:
  Fn fn_;
};

struct DeformationFamily {
  ParametricSurface surface;
  std::vector<VectorField3> fields;  // U^1 .. U^m

  int order() const { return static_cast<int>(fields.size()); }
};

struct FormData {
  double E = 0, F = 0, G = 0;
  double e = 0, f = 0, g = 0;
  Vec3 N = Vec3::Zero();
  double areaElem = 0;
  double K = 0;
};

inline FormData form_data_from_jet(const SurfaceJet& j) {
  Vec3 n = j.Rs.cross(j.Rt);
  double area = n.norm();
  double scale = j.Rs.norm() * j.Rt.norm();
  if (!(area > 64 * DBL_EPSILON * scale) || scale == 0)
    throw Error(ErrorKind::DegenerateParametrization, "|R_s x R_t| vanishes at the point");
  FormData d;
  d.E = j.Rs.dot(j.Rs);
  d.F = j.Rs.dot(j.Rt);
  d.G = j.Rt.dot(j.Rt);
  d.N = n / area;
  d.e = j.Rss.dot(d.N);
  d.f = j.Rst.dot(d.N);
  d.g = j.Rtt.dot(d.N);
  d.areaElem = area;
  d.K = (d.e * d.g - d.f * d.f) / (area * area);
  return d;
}

inline FormData fundamental_data(const ParametricSurface& surface, double s, double t) {
  return form_data_from_jet(surface.jet(s, t));
}

}  // namespace bendkit
