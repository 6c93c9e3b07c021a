#pragma once

#include <optional>
#include <random>

#include <json.hpp>

#include "asymptotic.hpp"
#include "bending.hpp"

namespace bendkit {

struct CertifyOptions {
  std::array<int, 2> grid{21, 21};
  std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  double tol = 1e-8;          // residual tolerance
  double trivial_tol = 1e-8;  // rigid-motion fit
  bool vekua = false;
  int points = 100;
  unsigned seed = 0;
};

struct VekuaReport {
  int order = 1;
  int used = 0;
  int skipped = 0;           // K <= 0 or flat points
  double max_residual = 0;   // |C Lh - A h + B conj(h) - C M|
  double max_C_mismatch = 0; // relative, against -4 g^2 (eg - f^2) |R_s x R_t|^2
};

struct Certificate {
  std::vector<double> residual_max;  // per order j
  bool residuals_ok = false;
  DefectFit fit;
  std::optional<TrivialityFit> triviality;  // of U^1
  std::vector<VekuaReport> vekua;
};

// uniform points in the domain from a seeded generator
inline std::vector<Point2> sample_points(const Domain& d, int n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) {
    if (d.kind == Domain::Kind::Annulus) {
      double r = d.a0 + (d.a1 - d.a0) * U(g), th = 2 * std::numbers::pi * U(g);
      pts.push_back({r * std::cos(th), r * std::sin(th)});
    } else {
      pts.push_back({d.a0 + (d.a1 - d.a0) * U(g), d.b0 + (d.b1 - d.b0) * U(g)});
    }
  }
  return pts;
}

inline VekuaReport vekua_report(const ParametricSurface& surface, std::span<const VectorField3> fields, int j,
                                const std::vector<Point2>& pts) {
  VekuaReport r;
  r.order = j;
  for (auto& p : pts) {
    try {
      asymptotic_data(surface, p.s, p.t);
      VekuaCoefficients v = vekua_coefficients(surface, fields, j, p.s, p.t);
      double Cc = vekua_C_closed_form(surface, p.s, p.t);
      if (!(std::abs(Cc) > 0)) {
        ++r.skipped;
        continue;
      }
      r.max_residual = std::max(r.max_residual, std::abs(vekua_residual(surface, fields, j, p.s, p.t)));
      r.max_C_mismatch = std::max(r.max_C_mismatch, std::abs(v.C - Cc) / std::abs(Cc));
      ++r.used;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NegativeCurvature && e.kind() != ErrorKind::FlatPointDegeneracy) throw;
      ++r.skipped;
    }
  }
  return r;
}

inline Certificate certify(const DeformationFamily& fam, const CertifyOptions& o) {
  if (fam.fields.empty()) throw Error(ErrorKind::MissingLowerOrderFields, "no fields to certify");
  Certificate c;
  const Domain& dom = fam.surface.domain();
  auto grid = dom.grid(o.grid[0], o.grid[1]);
  c.residuals_ok = true;
  for (int j = 1; j <= fam.order(); ++j) {
    double r = max_bending_residual(fam, j, grid);
    c.residual_max.push_back(r);
    c.residuals_ok = c.residuals_ok && r <= o.tol;
  }
  c.fit = metric_defect_order(fam, grid, o.eps);
  try {
    c.triviality = is_trivial(fam.fields[0], fam.surface, o.trivial_tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateSampleSet) throw;
  }
  if (o.vekua) {
    auto pts = sample_points(dom, o.points, o.seed);
    for (int j = 1; j <= fam.order(); ++j) c.vekua.push_back(vekua_report(fam.surface, fam.fields, j, pts));
  }
  return c;
}

// emitted certificates keep NaN out of JSON
inline nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

inline nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["residual_max"] = nlohmann::json::array();
  for (double r : c.residual_max) j["residual_max"].push_back(finite_or_null(r));
  j["residuals_ok"] = c.residuals_ok;
  j["defect_slope"] = finite_or_null(c.fit.slope);
  j["defect"] = {{"eps", c.fit.eps}, {"delta", c.fit.delta}, {"below_noise_floor", c.fit.below_noise_floor}};
  j["order"] = c.fit.certified_order;
  if (c.triviality) {
    j["trivial"] = c.triviality->trivial;
    j["triviality_residual"] = c.triviality->residual;
    j["rigid_motion"] = {{"A", {c.triviality->A.x(), c.triviality->A.y(), c.triviality->A.z()}},
                         {"B", {c.triviality->B.x(), c.triviality->B.y(), c.triviality->B.z()}}};
  }
  if (!c.vekua.empty()) {
    j["vekua"] = nlohmann::json::array();
    for (auto& v : c.vekua)
      j["vekua"].push_back({{"order", v.order},
                            {"points_used", v.used},
                            {"points_skipped", v.skipped},
                            {"max_residual", v.max_residual},
                            {"max_C_mismatch", v.max_C_mismatch}});
  }
  return j;
}

}  // namespace bendkit
