#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fourier.hpp"

namespace bendkit {

// r^exponent * profile(theta)
struct PolarTerm {
  double exponent = 0;
  PeriodicProfile profile;
};

// finite sum of polar terms; equal exponents are merged
class PolarFunction {
public:
  PolarFunction() = default;
  PolarFunction(double exponent, PeriodicProfile profile) { add(exponent, std::move(profile)); }

  static bool same_exponent(double a, double b) { return std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(a)); }

  void add(double exponent, const PeriodicProfile& profile) {
    if (profile.is_zero()) return;
    for (auto& t : terms_) {
      if (same_exponent(t.exponent, exponent)) {
        t.profile += profile;
        return;
      }
    }
    terms_.push_back({exponent, profile});
  }

  const std::vector<PolarTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double min_exponent() const {
    double mn = std::numeric_limits<double>::infinity();
    for (auto& t : terms_) mn = std::min(mn, t.exponent);
    return mn;
  }

  double value_polar(double r, double th) const {
    double s = 0;
    for (auto& t : terms_) s += std::pow(r, t.exponent) * t.profile(th);
    return s;
  }
  double operator()(double s, double t) const { return value_polar(std::hypot(s, t), std::atan2(t, s)); }

  // d/ds r^g a = r^{g-1} (g cos a - sin a'), d/dt r^g a = r^{g-1} (g sin a + cos a')
  PolarFunction d_s() const {
    PolarFunction r;
    for (auto& t : terms_) r.add(t.exponent - 1, t.profile.times_cos() * t.exponent - t.profile.derivative().times_sin());
    return r;
  }
  PolarFunction d_t() const {
    PolarFunction r;
    for (auto& t : terms_) r.add(t.exponent - 1, t.profile.times_sin() * t.exponent + t.profile.derivative().times_cos());
    return r;
  }

  PolarFunction operator+(const PolarFunction& o) const {
    PolarFunction r = *this;
    for (auto& t : o.terms_) r.add(t.exponent, t.profile);
    return r;
  }
  PolarFunction operator*(double c) const {
    PolarFunction r;
    for (auto& t : terms_) r.add(t.exponent, t.profile * c);
    return r;
  }
  PolarFunction operator-() const { return *this * -1.0; }
  PolarFunction operator-(const PolarFunction& o) const { return *this + (-o); }
  PolarFunction operator*(const PolarFunction& o) const {
    PolarFunction r;
    for (auto& a : terms_)
      for (auto& b : o.terms_) r.add(a.exponent + b.exponent, (a.profile * b.profile).trimmed());
    return r;
  }

private:
  std::vector<PolarTerm> terms_;
};

struct PolarField {
  PolarFunction u, v, w;

  double min_exponent() const { return std::min({u.min_exponent(), v.min_exponent(), w.min_exponent()}); }
};

}  // namespace bendkit
