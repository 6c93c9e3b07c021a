#pragma once

#include <map>
#include <vector>

#include "series.hpp"

namespace bendkit {

// bivariate polynomial in (s,t) with double coefficients
class Poly2 {
public:
  Poly2() = default;
  explicit Poly2(const std::map<Exponent2, double>& c) {
    for (auto& [e, v] : c) add(e.first, e.second, v);
  }
  explicit Poly2(const BivariateSeries& s) {
    for (auto& [e, v] : s.coeffs()) add(e.first, e.second, v.get_d());
  }
  static Poly2 monomial(int i, int j, double c = 1) {
    Poly2 p;
    p.add(i, j, c);
    return p;
  }

  void add(int i, int j, double c) {
    if (c == 0) return;
    double& slot = c_[{i, j}];
    slot += c;
    if (slot == 0) c_.erase({i, j});
    dx_ = std::max(dx_, i);
    dy_ = std::max(dy_, j);
  }

  const std::map<Exponent2, double>& coeffs() const { return c_; }

  double operator()(double s, double t) const {
    if (c_.empty()) return 0;
    thread_local std::vector<double> ps, pt;
    ps.assign(dx_ + 1, 1.0);
    pt.assign(dy_ + 1, 1.0);
    for (int i = 1; i <= dx_; ++i) ps[i] = ps[i - 1] * s;
    for (int j = 1; j <= dy_; ++j) pt[j] = pt[j - 1] * t;
    double r = 0;
    for (auto& [e, v] : c_) r += v * ps[e.first] * pt[e.second];
    return r;
  }

  Poly2 ds() const {
    Poly2 p;
    for (auto& [e, v] : c_)
      if (e.first > 0) p.add(e.first - 1, e.second, v * e.first);
    return p;
  }
  Poly2 dt() const {
    Poly2 p;
    for (auto& [e, v] : c_)
      if (e.second > 0) p.add(e.first, e.second - 1, v * e.second);
    return p;
  }

  Poly2 operator+(const Poly2& o) const {
    Poly2 p = *this;
    for (auto& [e, v] : o.c_) p.add(e.first, e.second, v);
    return p;
  }
  Poly2 operator*(double a) const {
    Poly2 p;
    for (auto& [e, v] : c_) p.add(e.first, e.second, v * a);
    return p;
  }

private:
  std::map<Exponent2, double> c_;
  int dx_ = 0, dy_ = 0;
};

}  // namespace bendkit
