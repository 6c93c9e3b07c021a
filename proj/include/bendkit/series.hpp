#pragma once

#include <algorithm>
#include <cmath>
#include <gmpxx.h>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "error.hpp"

namespace bendkit {

using Rational = mpq_class;
using Integer = mpz_class;

// truncation sentinel for exact polynomials
constexpr int kExact = std::numeric_limits<int>::max();

inline int trunc_add(int n, int d) {
  if (n == kExact) return kExact;
  return n + d;
}

inline Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty rational literal");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    // decimal literal, converted exactly
    bool neg = s[0] == '-';
    std::string body = (s[0] == '-' || s[0] == '+') ? s.substr(1) : s;
    dot = body.find('.');
    std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if ((ip + fp).empty() || (ip + fp).find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorKind::ParseError, "bad decimal literal '" + text + "'");
    Integer num((ip + fp).empty() ? "0" : (ip + fp).c_str(), 10);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    Rational q(num, den);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  Rational q;
  if (q.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
    throw Error(ErrorKind::ParseError, "bad rational literal '" + text + "'");
  if (q.get_den() == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

// Truncated univariate series with exact rational coefficients.
// Coefficients of exponents <= trunc are trusted; nothing is stored beyond it.
class UnivariateSeries {
public:
  UnivariateSeries() = default;
  explicit UnivariateSeries(int trunc) : trunc_(trunc) {}

  static UnivariateSeries monomial(int k, const Rational& c, int trunc = kExact) {
    UnivariateSeries s(trunc);
    s.set(k, c);
    return s;
  }

  int trunc() const { return trunc_; }
  bool exact() const { return trunc_ == kExact; }
  const std::map<int, Rational>& coeffs() const { return c_; }

  Rational coeff(int k) const {
    auto it = c_.find(k);
    return it == c_.end() ? Rational(0) : it->second;
  }

  void set(int k, const Rational& v) {
    if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent");
    if (k > trunc_) return;
    if (v == 0) {
      c_.erase(k);
    } else {
      c_[k] = v;
      c_[k].canonicalize();
    }
  }
  void add(int k, const Rational& v) { set(k, coeff(k) + v); }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return c_.empty() ? -1 : c_.rbegin()->first; }
  int valuation() const { return c_.empty() ? kExact : c_.begin()->first; }

  UnivariateSeries truncated(int n) const {
    UnivariateSeries r(std::min(n, trunc_));
    for (auto& [k, v] : c_)
      if (k <= r.trunc_) r.c_[k] = v;
    return r;
  }

  UnivariateSeries derivative() const {
    UnivariateSeries r(trunc_add(trunc_, -1));
    for (auto& [k, v] : c_)
      if (k > 0) r.set(k - 1, v * k);
    return r;
  }

  // multiply by t^s
  UnivariateSeries shifted(int s) const {
    UnivariateSeries r(trunc_add(trunc_, s));
    for (auto& [k, v] : c_) r.set(k + s, v);
    return r;
  }

  // h(t) -> h(t^p)
  UnivariateSeries compose_power(int p) const {
    UnivariateSeries r(trunc_ == kExact ? kExact : (trunc_ + 1) * p - 1);
    for (auto& [k, v] : c_) r.set(k * p, v);
    return r;
  }

  UnivariateSeries& operator+=(const UnivariateSeries& o) {
    trunc_ = std::min(trunc_, o.trunc_);
    for (auto it = c_.begin(); it != c_.end();)
      it = it->first > trunc_ ? c_.erase(it) : std::next(it);
    for (auto& [k, v] : o.c_) add(k, v);
    return *this;
  }
  UnivariateSeries operator+(const UnivariateSeries& o) const {
    UnivariateSeries r = *this;
    return r += o;
  }
  UnivariateSeries operator-() const {
    UnivariateSeries r = *this;
    for (auto& kv : r.c_) kv.second = -kv.second;
    return r;
  }
  UnivariateSeries operator-(const UnivariateSeries& o) const { return *this + (-o); }
  UnivariateSeries operator*(const Rational& a) const {
    UnivariateSeries r(trunc_);
    for (auto& [k, v] : c_) r.set(k, v * a);
    return r;
  }
  UnivariateSeries operator*(const UnivariateSeries& o) const {
    int n = std::min(trunc_add(trunc_, o.valuation() == kExact ? 0 : o.valuation()),
                     trunc_add(o.trunc_, valuation() == kExact ? 0 : valuation()));
    if (is_zero() || o.is_zero()) n = std::min(trunc_, o.trunc_);
    UnivariateSeries r(n);
    for (auto& [i, a] : c_)
      for (auto& [j, b] : o.c_)
        if (i + j <= n) r.add(i + j, a * b);
    return r;
  }

  // equality on the common trusted range
  bool operator==(const UnivariateSeries& o) const {
    int n = std::min(trunc_, o.trunc_);
    return truncated(n).c_ == o.truncated(n).c_;
  }

  double eval(double t) const {
    double s = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s += it->second.get_d() * std::pow(t, it->first);
    return s;
  }

private:
  std::map<int, Rational> c_;
  int trunc_ = kExact;
};

using Exponent2 = std::pair<int, int>;

// Truncated bivariate series in (x,y) with exact rational coefficients on the box
// i <= trunc_x, j <= trunc_y.
class BivariateSeries {
public:
  BivariateSeries() = default;
  BivariateSeries(int tx, int ty) : tx_(tx), ty_(ty) {}

  int trunc_x() const { return tx_; }
  int trunc_y() const { return ty_; }
  bool exact() const { return tx_ == kExact && ty_ == kExact; }
  const std::map<Exponent2, Rational>& coeffs() const { return c_; }

  Rational coeff(int i, int j) const {
    auto it = c_.find({i, j});
    return it == c_.end() ? Rational(0) : it->second;
  }
  void set(int i, int j, const Rational& v) {
    if (i < 0 || j < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent");
    if (i > tx_ || j > ty_) return;
    if (v == 0) {
      c_.erase({i, j});
    } else {
      Rational& c = c_[{i, j}];
      c = v;
      c.canonicalize();
    }
  }
  void add(int i, int j, const Rational& v) { set(i, j, coeff(i, j) + v); }
  bool is_zero() const { return c_.empty(); }

  BivariateSeries restricted(int tx, int ty) const {
    BivariateSeries r(std::min(tx, tx_), std::min(ty, ty_));
    for (auto& [e, v] : c_)
      if (e.first <= r.tx_ && e.second <= r.ty_) r.c_[e] = v;
    return r;
  }

  BivariateSeries diff_x() const {
    BivariateSeries r(trunc_add(tx_, -1), ty_);
    for (auto& [e, v] : c_)
      if (e.first > 0) r.set(e.first - 1, e.second, v * e.first);
    return r;
  }
  BivariateSeries diff_y() const {
    BivariateSeries r(tx_, trunc_add(ty_, -1));
    for (auto& [e, v] : c_)
      if (e.second > 0) r.set(e.first, e.second - 1, v * e.second);
    return r;
  }
  // termwise antiderivative with zero constant
  BivariateSeries integrate_x() const {
    BivariateSeries r(trunc_add(tx_, 1), ty_);
    for (auto& [e, v] : c_) r.set(e.first + 1, e.second, v / (e.first + 1));
    return r;
  }
  BivariateSeries integrate_y() const {
    BivariateSeries r(tx_, trunc_add(ty_, 1));
    for (auto& [e, v] : c_) r.set(e.first, e.second + 1, v / (e.second + 1));
    return r;
  }
  BivariateSeries times_monomial(int a, int b, const Rational& c = 1) const {
    BivariateSeries r(trunc_add(tx_, a), trunc_add(ty_, b));
    for (auto& [e, v] : c_) r.set(e.first + a, e.second + b, v * c);
    return r;
  }

  // coefficient of y^j as a series in x
  UnivariateSeries slice_y(int j) const {
    UnivariateSeries r(tx_);
    for (auto& [e, v] : c_)
      if (e.second == j) r.set(e.first, v);
    return r;
  }
  // adds f(x) y^j
  void add_slice(int j, const UnivariateSeries& f) {
    for (auto& [k, v] : f.coeffs()) add(k, j, v);
  }

  BivariateSeries& operator+=(const BivariateSeries& o) {
    *this = restricted(o.tx_, o.ty_);
    for (auto& [e, v] : o.c_) add(e.first, e.second, v);
    return *this;
  }
  BivariateSeries operator+(const BivariateSeries& o) const {
    BivariateSeries r = *this;
    return r += o;
  }
  BivariateSeries operator-() const {
    BivariateSeries r = *this;
    for (auto& kv : r.c_) kv.second = -kv.second;
    return r;
  }
  BivariateSeries operator-(const BivariateSeries& o) const { return *this + (-o); }
  BivariateSeries operator*(const Rational& a) const {
    BivariateSeries r(tx_, ty_);
    for (auto& [e, v] : c_) r.set(e.first, e.second, v * a);
    return r;
  }
  // product of polynomials; truncations handled conservatively
  BivariateSeries operator*(const BivariateSeries& o) const {
    int tx = std::min(tx_, o.tx_), ty = std::min(ty_, o.ty_);
    BivariateSeries r(tx, ty);
    for (auto& [a, u] : c_)
      for (auto& [b, v] : o.c_) r.add(a.first + b.first, a.second + b.second, u * v);
    return r;
  }

  bool operator==(const BivariateSeries& o) const {
    int tx = std::min(tx_, o.tx_), ty = std::min(ty_, o.ty_);
    return restricted(tx, ty).c_ == o.restricted(tx, ty).c_;
  }
  // bitwise identity including the box
  bool identical(const BivariateSeries& o) const {
    return tx_ == o.tx_ && ty_ == o.ty_ && c_ == o.c_;
  }

  double eval(double x, double y) const {
    double s = 0;
    for (auto& [e, v] : c_) s += v.get_d() * std::pow(x, e.first) * std::pow(y, e.second);
    return s;
  }

  int max_degree_x() const {
    int d = -1;
    for (auto& kv : c_) d = std::max(d, kv.first.first);
    return d;
  }
  int max_degree_y() const {
    int d = -1;
    for (auto& kv : c_) d = std::max(d, kv.first.second);
    return d;
  }

private:
  std::map<Exponent2, Rational> c_;
  int tx_ = kExact, ty_ = kExact;
};

}  // namespace bendkit
