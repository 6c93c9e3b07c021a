#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace bendkit {

// Finite Fourier series a_0 + sum_k (a_k cos k th + b_k sin k th).
// Both lists are indexed by frequency from 0; b_0 is ignored.
class PeriodicProfile {
public:
  PeriodicProfile() : a_{0.0}, b_{0.0} {}
  PeriodicProfile(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
      : a_(std::move(cos_coeffs)), b_(std::move(sin_coeffs)) {
    if (a_.empty()) a_.push_back(0.0);
    std::size_t n = std::max(a_.size(), b_.size());
    a_.resize(n, 0.0);
    b_.resize(n, 0.0);
    b_[0] = 0.0;
  }
  static PeriodicProfile constant(double c) { return PeriodicProfile({c}, {0.0}); }

  int degree() const { return static_cast<int>(a_.size()) - 1; }
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }

  double operator()(double th) const { return value(th); }

  double value(double th, int order = 0) const {
    // rotate e^{ik th} incrementally
    const std::complex<double> step = std::polar(1.0, th);
    std::complex<double> z = 1.0;
    double s = 0;
    for (std::size_t k = 0; k < a_.size(); ++k) {
      double c = z.real(), sn = z.imag();
      double ak = a_[k], bk = b_[k];
      // d/dth (a cos + b sin) = k(b cos - a sin)
      for (int o = 0; o < order; ++o) {
        double na = k * bk, nb = -(double)k * ak;
        ak = na;
        bk = nb;
      }
      s += ak * c + bk * sn;
      z *= step;
      if ((k & 31) == 31) z /= std::abs(z);
    }
    return s;
  }

  PeriodicProfile derivative() const {
    PeriodicProfile d = *this;
    for (std::size_t k = 0; k < a_.size(); ++k) {
      d.a_[k] = k * b_[k];
      d.b_[k] = -(double)k * a_[k];
    }
    return d;
  }

  PeriodicProfile operator+(const PeriodicProfile& o) const {
    PeriodicProfile r = *this;
    r.grow(o.a_.size());
    for (std::size_t k = 0; k < o.a_.size(); ++k) {
      r.a_[k] += o.a_[k];
      r.b_[k] += o.b_[k];
    }
    return r;
  }
  PeriodicProfile operator-() const { return *this * -1.0; }
  PeriodicProfile operator-(const PeriodicProfile& o) const { return *this + (-o); }
  PeriodicProfile operator*(double c) const {
    PeriodicProfile r = *this;
    for (auto& v : r.a_) v *= c;
    for (auto& v : r.b_) v *= c;
    return r;
  }
  PeriodicProfile& operator+=(const PeriodicProfile& o) { return *this = *this + o; }

  PeriodicProfile times_cos() const { return shift_product(1, true); }
  PeriodicProfile times_sin() const { return shift_product(1, false); }

  PeriodicProfile operator*(const PeriodicProfile& o) const {
    const std::size_t n = a_.size(), m = o.a_.size();
    std::vector<std::complex<double>> p(n), q(m);
    // c_k for k >= 0 of f = sum Re(c_k e^{ik th}) with c_0 real
    for (std::size_t k = 0; k < n; ++k) p[k] = {a_[k], -b_[k]};
    for (std::size_t k = 0; k < m; ++k) q[k] = {o.a_[k], -o.b_[k]};
    // f = p_0 + sum_{k>0} (p_k e^{ik} + conj(p_k) e^{-ik})/2
    std::vector<std::complex<double>> full(n + m - 1, 0.0);
    auto half = [](const std::vector<std::complex<double>>& v, long k) -> std::complex<double> {
      long a = std::labs(k);
      if (a >= (long)v.size()) return 0.0;
      if (k == 0) return v[0];
      return k > 0 ? v[a] * 0.5 : std::conj(v[a]) * 0.5;
    };
    for (long i = -(long)n + 1; i < (long)n; ++i) {
      auto fi = half(p, i);
      if (fi == 0.0) continue;
      for (long j = -(long)m + 1; j < (long)m; ++j) {
        long k = i + j;
        if (k < 0) continue;
        auto gj = half(q, j);
        if (gj == 0.0) continue;
        full[k] += fi * gj;
      }
    }
    std::vector<double> ca(n + m - 1), sb(n + m - 1);
    ca[0] = full[0].real();
    for (std::size_t k = 1; k < full.size(); ++k) {
      ca[k] = 2 * full[k].real();
      sb[k] = -2 * full[k].imag();
    }
    return PeriodicProfile(std::move(ca), std::move(sb));
  }

  // drops trailing modes below tol * max |coefficient|
  PeriodicProfile trimmed(double rel_tol = 1e-17) const {
    double mx = 0;
    for (std::size_t k = 0; k < a_.size(); ++k) mx = std::max({mx, std::abs(a_[k]), std::abs(b_[k])});
    std::size_t keep = a_.size();
    while (keep > 1 && std::abs(a_[keep - 1]) <= rel_tol * mx && std::abs(b_[keep - 1]) <= rel_tol * mx) --keep;
    PeriodicProfile r = *this;
    r.a_.resize(keep);
    r.b_.resize(keep);
    return r;
  }

  bool is_zero() const {
    for (std::size_t k = 0; k < a_.size(); ++k)
      if (a_[k] != 0.0 || b_[k] != 0.0) return false;
    return true;
  }

  double max_abs_coeff() const {
    double mx = 0;
    for (std::size_t k = 0; k < a_.size(); ++k) mx = std::max({mx, std::abs(a_[k]), std::abs(b_[k])});
    return mx;
  }

  // trigonometric interpolation of N equispaced samples th_k = 2 pi k / N
  static PeriodicProfile from_samples(const std::vector<double>& v) {
    const std::size_t N = v.size();
    if (N < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 samples");
    const std::size_t K = (N - 1) / 2;
    std::vector<double> a(K + 1, 0.0), b(K + 1, 0.0);
    for (std::size_t k = 0; k <= K; ++k) {
      double sa = 0, sb = 0;
      for (std::size_t i = 0; i < N; ++i) {
        double ang = 2 * std::numbers::pi * double((k * i) % N) / N;
        sa += v[i] * std::cos(ang);
        sb += v[i] * std::sin(ang);
      }
      a[k] = (k == 0 ? 1.0 : 2.0) * sa / N;
      b[k] = k == 0 ? 0.0 : 2.0 * sb / N;
    }
    return PeriodicProfile(std::move(a), std::move(b));
  }

  std::vector<double> sample(std::size_t N) const {
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = value(2 * std::numbers::pi * i / N);
    return v;
  }

  // min of the profile on a grid
  double grid_min(std::size_t N = 4096) const {
    double mn = value(0);
    for (std::size_t i = 1; i < N; ++i) mn = std::min(mn, value(2 * std::numbers::pi * i / N));
    return mn;
  }

  bool operator==(const PeriodicProfile& o) const {
    std::size_t n = std::max(a_.size(), o.a_.size());
    for (std::size_t k = 0; k < n; ++k) {
      double a1 = k < a_.size() ? a_[k] : 0, a2 = k < o.a_.size() ? o.a_[k] : 0;
      double b1 = k < b_.size() ? b_[k] : 0, b2 = k < o.b_.size() ? o.b_[k] : 0;
      if (a1 != a2 || (k > 0 && b1 != b2)) return false;
    }
    return true;
  }

private:
  void grow(std::size_t n) {
    if (a_.size() < n) {
      a_.resize(n, 0.0);
      b_.resize(n, 0.0);
    }
  }
  PeriodicProfile shift_product(int, bool with_cos) const {
    const std::size_t n = a_.size();
    std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double ak = a_[k], bk = k ? b_[k] : 0.0;
      if (with_cos) {
        // cos k cos = (cos(k+1) + cos(k-1))/2, sin k cos = (sin(k+1) + sin(k-1))/2
        a[k + 1] += ak / 2;
        b[k + 1] += bk / 2;
        if (k == 0) {
          a[1] += ak / 2;
        } else {
          a[k - 1] += ak / 2;
          b[k - 1] += bk / 2;
        }
      } else {
        // cos k sin = (sin(k+1) - sin(k-1))/2, sin k sin = (cos(k-1) - cos(k+1))/2
        b[k + 1] += ak / 2;
        a[k + 1] -= bk / 2;
        if (k == 0) {
          b[1] += ak / 2;
        } else {
          b[k - 1] -= ak / 2;
          a[k - 1] += bk / 2;
        }
      }
    }
    b[0] = 0;
    return PeriodicProfile(std::move(a), std::move(b));
  }

  std::vector<double> a_, b_;
};

}  // namespace bendkit
