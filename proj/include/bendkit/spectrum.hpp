#pragma once

#include <boost/math/tools/toms748_solve.hpp>
#include <mutex>

#include "floquet.hpp"
#include "parallel.hpp"

namespace bendkit {

struct FloquetEigenvalue {
  double value = 0;
  int j = 0;            // index in lambda_1^- <= lambda_1^+ < lambda_2^- ...
  char tag = '-';
  int multiplicity = 1; // 2 when lambda_j^- = lambda_j^+
  bool periodic = true; // trace +2 (periodic) or -2 (antiperiodic)
};

struct SpectralData {
  double b1 = 0, b2 = 0;
  std::vector<FloquetEigenvalue> eigenvalues;
  std::vector<Interval> singular_flags;
};

struct SpectrumOptions {
  double lambda_min = 1e-3;
  double double_root_trace_tol = 1e-7;
  double double_root_matrix_tol = 1e-6;
  int refine_cap = 12;
};

namespace detail {

struct TraceSample {
  double lambda = 0, T = 0, dT = 0;
  Eigen::Matrix2d Phi;
};

inline TraceSample trace_sample(const CoefficientMatrices& cm, double l) {
  auto [Phi, dPhi] = monodromy_with_derivative(cm, l);
  return {l, Phi.trace(), dPhi.trace(), Phi};
}

struct Root {
  double value;
  bool periodic;
  bool dbl;
};

inline double toms(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

inline int sgn(double x) { return (x > 0) - (x < 0); }

class Scanner {
public:
  Scanner(const CoefficientMatrices& cm, const SpectrumOptions& o) : cm_(cm), o_(o) {}

  // roots of trace = +-2 in [a.lambda, b.lambda)
  void cell(const TraceSample& a, const TraceSample& b, int depth, std::vector<Root>& out) const {
    TraceSample mid = trace_sample(cm_, 0.5 * (a.lambda + b.lambda));
    int sa = sgn(a.dT), sb = sgn(b.dT), sm = sgn(mid.dT);
    if (sa == sb && sm == sa) {
      monotone(a, b, out, false, false);
      return;
    }
    if (sa != sb && sa != 0 && sb != 0) {
      // one extremum; the midpoint sits on one side of it
      auto f = [&](double l) { return trace_sample(cm_, l).dT; };
      double x = toms(f, a.lambda, b.lambda, a.dT, b.dT);
      TraceSample ex = trace_sample(cm_, x);
      bool ok_left = sgn(mid.dT) == sa || mid.lambda >= x;
      bool ok_right = sgn(mid.dT) == sb || mid.lambda <= x;
      if (ok_left && ok_right) {
        extremum(a, ex, b, out);
        return;
      }
    }
    if (depth >= o_.refine_cap)
      throw Error(ErrorKind::RangeTooCoarse, "trace oscillates inside a cell near lambda = " + std::to_string(a.lambda));
    cell(a, mid, depth + 1, out);
    cell(mid, b, depth + 1, out);
  }

private:
  void extremum(const TraceSample& a, const TraceSample& ex, const TraceSample& b, std::vector<Root>& out) const {
    bool touch[2] = {false, false};
    for (int k = 0; k < 2; ++k) {
      double target = k == 0 ? 2.0 : -2.0;
      if (std::abs(ex.T - target) < o_.double_root_trace_tol &&
          (ex.Phi - target / 2 * Eigen::Matrix2d::Identity()).norm() < o_.double_root_matrix_tol) {
        out.push_back({ex.lambda, k == 0, true});
        out.push_back({ex.lambda, k == 0, true});
        touch[k] = true;
      } else if (std::abs(ex.T - target) < o_.double_root_trace_tol && sgn(a.T - target) == sgn(ex.T - target) &&
                 sgn(b.T - target) == sgn(ex.T - target)) {
        // gap narrower than the integration error: two simple roots at the extremum
        out.push_back({ex.lambda, k == 0, false});
        out.push_back({ex.lambda, k == 0, false});
        touch[k] = true;
      }
    }
    monotone(a, ex, out, touch[0], touch[1]);
    monotone(ex, b, out, touch[0], touch[1]);
  }

  // simple roots by sign change; skip_p/skip_a suppress a branch next to a double root
  void monotone(const TraceSample& a, const TraceSample& b, std::vector<Root>& out, bool skip_p, bool skip_a) const {
    for (int k = 0; k < 2; ++k) {
      if (k == 0 ? skip_p : skip_a) continue;
      double target = k == 0 ? 2.0 : -2.0;
      double fa = a.T - target, fb = b.T - target;
      if (fa == 0) {
        out.push_back({a.lambda, k == 0, false});
        continue;
      }
      if (fb == 0 || sgn(fa) == sgn(fb)) continue;
      auto f = [&](double l) { return trace_sample(cm_, l).T - target; };
      out.push_back({toms(f, a.lambda, b.lambda, fa, fb), k == 0, false});
    }
  }

  const CoefficientMatrices& cm_;
  SpectrumOptions o_;
};

}  // namespace detail

// all positive eigenvalues up to lambda_max, periodic and antiperiodic, indexed per the oscillation ordering
inline std::vector<FloquetEigenvalue> floquet_sequence(const CoefficientMatrices& cm, double b1, double lambda_max,
                                                       const SpectrumOptions& opt = {}) {
  const double step = std::numbers::pi / (8 * b1);
  std::vector<double> nodes;
  for (double l = opt.lambda_min; l < lambda_max + step; l += step) nodes.push_back(l);
  std::vector<detail::TraceSample> samples(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { samples[i] = detail::trace_sample(cm, nodes[i]); });
  std::vector<std::vector<detail::Root>> per_cell(nodes.size() - 1);
  detail::Scanner sc(cm, opt);
  parallel_for(per_cell.size(), [&](std::size_t i) { sc.cell(samples[i], samples[i + 1], 0, per_cell[i]); });
  std::vector<detail::Root> roots;
  for (auto& c : per_cell) roots.insert(roots.end(), c.begin(), c.end());
  std::sort(roots.begin(), roots.end(), [](auto& x, auto& y) { return x.value < y.value; });
  std::vector<FloquetEigenvalue> seq;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i].value > lambda_max) break;
    FloquetEigenvalue e;
    e.value = roots[i].value;
    e.j = static_cast<int>(i / 2) + 1;
    e.tag = i % 2 == 0 ? '-' : '+';
    e.multiplicity = roots[i].dbl ? 2 : 1;
    e.periodic = roots[i].periodic;
    if (e.periodic != (e.j % 2 == 0))
      throw Error(ErrorKind::RangeTooCoarse, "root count lost parity near lambda = " + std::to_string(e.value));
    seq.push_back(e);
  }
  return seq;
}

// periodic eigenvalues in [lo, hi]
inline SpectralData spectrum(double m, const PeriodicProfile& P, double lo, double hi, const SpectrumOptions& opt = {}) {
  check_homogeneous(m, P);
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, "empty lambda range");
  CurvatureMargin cmg = curvature_margin(m, P);
  if (!(cmg.margin > 0)) throw Error(ErrorKind::CurvatureViolation, "curvature margin is not positive");
  BInvariants bi = b_invariants(m, P);
  SpectralData sd;
  sd.b1 = bi.b1;
  sd.b2 = bi.b2;
  sd.singular_flags = bi.singular_flags;
  CoefficientMatrices cm(m, P);
  for (auto& e : floquet_sequence(cm, bi.b1, hi, opt))
    if (e.periodic && e.value >= lo && e.value <= hi) sd.eigenvalues.push_back(e);
  return sd;
}

}  // namespace bendkit
