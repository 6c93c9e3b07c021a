#pragma once

#include <Eigen/SVD>
#include <cfloat>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "parallel.hpp"
#include "surface.hpp"

namespace bendkit {

struct SourceTerms {
  double F = 0, G = 0, H = 0;
};

// sources of the order-j equations from jets of U^1..U^{j-1}
inline SourceTerms rhs_terms_from_jets(std::span<const FieldJet> jets, int j) {
  if (j < 1) throw Error(ErrorKind::InvalidArgument, "order index must be >= 1");
  if (j == 1) return {};
  if (static_cast<int>(jets.size()) < j - 1)
    throw Error(ErrorKind::MissingLowerOrderFields,
                "order " + std::to_string(j) + " needs " + std::to_string(j - 1) + " lower fields, got " +
                    std::to_string(jets.size()));
  SourceTerms r;
  for (int i = 1; i <= j - 1; ++i) {
    const FieldJet& a = jets[j - i - 1];
    const FieldJet& b = jets[i - 1];
    r.F -= a.Us.dot(b.Us);
    r.G -= b.Us.dot(a.Ut) + b.Ut.dot(a.Us);
    r.H -= a.Ut.dot(b.Ut);
  }
  return r;
}

inline SourceTerms rhs_terms(std::span<const VectorField3> fields, int j, double s, double t) {
  if (j < 1) throw Error(ErrorKind::InvalidArgument, "order index must be >= 1");
  if (j == 1) return {};
  if (static_cast<int>(fields.size()) < j - 1)
    throw Error(ErrorKind::MissingLowerOrderFields,
                "order " + std::to_string(j) + " needs " + std::to_string(j - 1) + " lower fields, got " +
                    std::to_string(fields.size()));
  std::vector<FieldJet> jets;
  for (int i = 0; i < j - 1; ++i) jets.push_back(fields[i].jet(s, t));
  return rhs_terms_from_jets(jets, j);
}

inline Vec3 bending_residual(const DeformationFamily& d, int j, double s, double t) {
  if (j < 1 || j > d.order())
    throw Error(ErrorKind::InvalidArgument, "order index outside 1.." + std::to_string(d.order()));
  SurfaceJet R = d.surface.jet(s, t);
  std::vector<FieldJet> jets;
  for (int i = 0; i < j; ++i) jets.push_back(d.fields[i].jet(s, t));
  SourceTerms src = rhs_terms_from_jets(jets, j);
  const FieldJet& U = jets[j - 1];
  return Vec3(R.Rs.dot(U.Us) - src.F, R.Rs.dot(U.Ut) + R.Rt.dot(U.Us) - src.G, R.Rt.dot(U.Ut) - src.H);
}

// max over points and components of |bending_residual|
inline double max_bending_residual(const DeformationFamily& d, int j, const std::vector<Point2>& grid) {
  std::vector<double> part(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    part[i] = bending_residual(d, j, grid[i].s, grid[i].t).cwiseAbs().maxCoeff();
  });
  double mx = 0;
  for (double v : part) mx = std::max(mx, v);
  return mx;
}

enum class DefectNorm { MaxEntry, Frobenius };

struct DefectFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> eps;
  std::vector<double> delta;
  bool below_noise_floor = false;  // too few values above 10 * machine epsilon
  int certified_order = 0;
};

// Delta(eps) = max over the grid of the metric tensor defect of R + 2 sum eps^j U^j.
// The entries are expanded so that no O(1) quantities cancel.
inline double metric_defect(const DeformationFamily& d, const std::vector<Point2>& grid, double eps,
                            DefectNorm norm = DefectNorm::MaxEntry) {
  std::vector<double> part(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const Point2& p = grid[k];
    SurfaceJet R = d.surface.jet(p.s, p.t);
    Vec3 ds = Vec3::Zero(), dt = Vec3::Zero();
    double e = 1;
    for (const auto& f : d.fields) {
      e *= eps;
      FieldJet U = f.jet(p.s, p.t);
      ds += 2 * e * U.Us;
      dt += 2 * e * U.Ut;
    }
    double dE = 2 * R.Rs.dot(ds) + ds.dot(ds);
    double dF = R.Rs.dot(dt) + R.Rt.dot(ds) + ds.dot(dt);
    double dG = 2 * R.Rt.dot(dt) + dt.dot(dt);
    part[k] = norm == DefectNorm::MaxEntry ? std::max({std::abs(dE), std::abs(dF), std::abs(dG)})
                                           : std::sqrt(dE * dE + 2 * dF * dF + dG * dG);
  });
  double mx = 0;
  for (double v : part) mx = std::max(mx, v);
  return mx;
}

inline DefectFit metric_defect_order(const DeformationFamily& d, const std::vector<Point2>& grid,
                                     const std::vector<double>& eps_list, DefectNorm norm = DefectNorm::MaxEntry,
                                     double tol = 0.1) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
  if (eps_list.size() < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 eps values");
  double lo = eps_list.front(), hi = eps_list.front();
  for (double e : eps_list) {
    if (!(e > 0)) throw Error(ErrorKind::InvalidArgument, "eps values must be positive");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi / lo < 100 * (1 - 1e-12)) throw Error(ErrorKind::InvalidArgument, "eps values must span 2 decades");
  DefectFit fit;
  fit.eps = eps_list;
  const double floor = 10 * DBL_EPSILON;
  std::vector<double> xs, ys;
  for (double e : eps_list) {
    double D = metric_defect(d, grid, e, norm);
    fit.delta.push_back(D);
    if (D > floor) {
      xs.push_back(std::log(e));
      ys.push_back(std::log(D));
    }
  }
  if (xs.size() < 2) {
    fit.below_noise_floor = true;
    fit.certified_order = d.order();
    return fit;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= xs.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.slope = sxy / sxx;
  fit.certified_order = std::clamp(static_cast<int>(std::floor(fit.slope + tol)) - 1, 0, d.order());
  return fit;
}

inline VectorField3 trivial_field(const Vec3& A, const Vec3& B, const ParametricSurface& surface) {
  return VectorField3([A, B, surface](double s, double t) {
    SurfaceJet j = surface.jet(s, t);
    return FieldJet{A.cross(j.R) + B, A.cross(j.Rs), A.cross(j.Rt)};
  });
}

struct TrivialityFit {
  bool trivial = false;
  Vec3 A = Vec3::Zero(), B = Vec3::Zero();
  double residual = 0;
};

inline TrivialityFit is_trivial(const VectorField3& field, const ParametricSurface& surface,
                                const std::vector<Point2>& samples, double tol) {
  const int n = static_cast<int>(samples.size());
  if (n < 3) throw Error(ErrorKind::DegenerateSampleSet, "need at least 3 sample points");
  Eigen::MatrixXd M(3 * n, 6);
  Eigen::VectorXd rhs(3 * n);
  std::vector<Vec3> Rv(n), Uv(n);
  for (int i = 0; i < n; ++i) {
    Rv[i] = surface(samples[i].s, samples[i].t);
    Uv[i] = field(samples[i].s, samples[i].t);
    const Vec3& R = Rv[i];
    // A x R = -[R]_x A
    Eigen::Matrix3d cr;
    cr << 0, -R.z(), R.y(), R.z(), 0, -R.x(), -R.y(), R.x(), 0;
    M.block<3, 3>(3 * i, 0) = -cr;
    M.block<3, 3>(3 * i, 3) = Eigen::Matrix3d::Identity();
    rhs.segment<3>(3 * i) = Uv[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(5) <= 1e-10 * sv(0)) throw Error(ErrorKind::DegenerateSampleSet, "sample points do not fix a rigid motion");
  Eigen::VectorXd x = svd.solve(rhs);
  TrivialityFit fit;
  fit.A = x.head<3>();
  fit.B = x.tail<3>();
  for (int i = 0; i < n; ++i) fit.residual = std::max(fit.residual, (Uv[i] - fit.A.cross(Rv[i]) - fit.B).norm());
  fit.trivial = fit.residual < tol;
  return fit;
}

inline TrivialityFit is_trivial(const VectorField3& field, const ParametricSurface& surface, double tol) {
  return is_trivial(field, surface, surface.domain().grid(7, 7), tol);
}

}  // namespace bendkit
