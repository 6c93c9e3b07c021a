// bendkit command-line front end
//
// exit codes: 0 ok, 1 internal failure, 2 parse/schema/solution-form errors,
// 3 curvature violation, 4 resonance

#include <iostream>

#include <CLI11.hpp>

#include "bendkit/bendkit.hpp"

namespace fs = std::filesystem;
using namespace bendkit;
using io::json;

namespace {

struct Flags {
  std::string in, out;
  int trunc = 0, order = 0, seed = 0;
  double smooth = 0, tol = 0;
  std::vector<double> range;
};

// raised after the error body has been prepared
struct Failure {
  int code;
  json body;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::SchemaError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::MissingLowerOrderFields:
    case ErrorKind::NotInSolutionForm:
    case ErrorKind::NotDivisible:
    case ErrorKind::CompatibilityFailure:
      return 2;
    case ErrorKind::CurvatureViolation:
      return 3;
    case ErrorKind::ResonantExponent:
    case ErrorKind::ResonantForcing:
      return 4;
    default:
      return 1;
  }
}

std::string fmt(double x, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

// file options overridden by explicit flags
io::Options merged(io::Options o, const Flags& f, const CLI::App& sc) {
  if (sc.count("--trunc")) o.trunc = f.trunc;
  if (sc.count("--order")) o.order = f.order;
  if (sc.count("--seed")) o.seed = f.seed;
  if (sc.count("--smooth")) o.smooth = f.smooth;
  if (sc.count("--tol")) o.tol = f.tol;
  if (sc.count("--range")) o.range = {f.range[0], f.range[1]};
  json check = json::object();
  if (o.trunc) check["trunc"] = *o.trunc;
  if (o.order) check["order"] = *o.order;
  if (o.seed) check["seed"] = *o.seed;
  if (o.smooth) check["smooth"] = *o.smooth;
  if (o.tol) check["tol"] = *o.tol;
  if (o.range) check["range"] = {o.range->first, o.range->second};
  io::options_from_json(check);
  return o;
}

const io::SurfaceDoc& need_surface(const io::JobDoc& job, const std::string& kind) {
  if (!job.surface) throw Error(ErrorKind::SchemaError, "$: missing key \"surface\"");
  if (!kind.empty() && job.surface->kind != kind)
    throw Error(ErrorKind::SchemaError, "$.surface.kind: this command needs \"" + kind + "\"");
  return *job.surface;
}

json curvature_json(const CurvatureMargin& c) {
  return {{"margin", c.margin}, {"argmin", c.argmin}, {"violating_theta", c.violating}};
}

json nonresonance_json(const NonresonanceReport& r) {
  json j = {{"order", r.order}, {"pass", r.pass}, {"margin", finite_or_null(r.margin)}, {"collision", r.collision}};
  if (std::isfinite(r.reduced_margin)) j["reduced_margin"] = r.reduced_margin;
  return j;
}

void check_curvature(const io::Profile& p) {
  CurvatureMargin c = curvature_margin(p.m, p.P);
  if (!(c.margin > 0)) {
    json body = {{"error", "CurvatureViolation"},
                 {"message", "m^2 P^2 + m P P'' - (m-1) P'^2 is not positive"},
                 {"curvature", curvature_json(c)}};
    throw Failure{3, body};
  }
}

CertifyOptions certify_options(const io::Options& o, std::array<int, 2> grid, std::vector<double> eps, double tol) {
  CertifyOptions c;
  c.grid = o.grid.value_or(grid);
  c.eps = o.eps.value_or(eps);
  c.tol = o.tol.value_or(tol);
  c.vekua = o.vekua.value_or(false);
  c.points = o.points.value_or(100);
  c.seed = static_cast<unsigned>(o.seed.value_or(0));
  return c;
}

std::string run_analytic(const io::JobDoc& job, const fs::path& out, json& cert) {
  const io::SurfaceDoc& s = need_surface(job, "smn");
  const int N = job.options.trunc.value_or(20);
  GeneratorQuad quad = job.quad.value_or(GeneratorQuad{});
  BivariateSeries w = build_w(s.m, s.n, s.eps, quad, N);
  const bool pde_zero = pde_residual(w, s.m, s.n, s.eps).is_zero();
  GeneratorQuad back = extract_generators(w, s.m, s.n, s.eps);
  RecoveredBending rb = recover_bending(w, s.m, s.n, s.eps);
  bool linear_zero = true;
  io::FieldDoc fd;
  if (rb.st) {
    auto res = smn_linear_residual((*rb.st)[0], (*rb.st)[1], (*rb.st)[2], s.m, s.n, s.eps);
    for (auto& r : res) linear_zero = linear_zero && r.is_zero();
    fd = io::series_field(*rb.st);
  } else {
    fd = io::poly_field(rb.st_double);
  }
  io::write_json_file(out / "w.json", io::to_json(w, "x,y"));
  io::write_json_file(out / "field.json", io::fields_to_json({fd}));

  ParametricSurface surf = s.surface();
  DeformationFamily fam{surf, {fd.field()}};
  Certificate c = certify(fam, certify_options(job.options, {21, 21}, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4}, 1e-8));
  const double C = radius_constant(s.m, s.n);
  cert = to_json(c);
  cert["surface"] = {{"kind", "smn"}, {"m", s.m}, {"n", s.n}, {"eps", s.eps}};
  cert["domain"] = io::to_json(surf.domain());
  cert["trunc"] = N;
  cert["w_box"] = {w.trunc_x() == kExact ? json("exact") : json(w.trunc_x()),
                   w.trunc_y() == kExact ? json("exact") : json(w.trunc_y())};
  cert["pde_residual_zero"] = pde_zero;
  cert["linear_residual_zero"] = linear_zero;
  cert["generators_roundtrip"] = back == quad;
  cert["exact_scaling"] = rb.exact.has_value();
  cert["scaling"] = {{"P", rb.scaling.P}, {"Q", rb.scaling.Q}, {"lam", rb.scaling.lam}};
  if (rb.exact)
    cert["scaling_exact"] = {{"P", io::rational_string(rb.exact->P)},
                             {"Q", io::rational_string(rb.exact->Q)},
                             {"lam", io::rational_string(rb.exact->lam)}};
  cert["radius"] = {{"constant", C},
                    {"series_bound_unit_R", C},
                    {"surface_bound_unit_R", std::min(std::pow(1 / C, s.m + 2), std::pow(1 / C, s.n + 2))}};
  return "analytic m=" + std::to_string(s.m) + " n=" + std::to_string(s.n) + " eps=" + std::to_string(s.eps) +
         " trunc=" + std::to_string(N) + ": pde_residual_zero=" + (pde_zero ? "true" : "false") +
         " defect_slope=" + (std::isfinite(c.fit.slope) ? fmt(c.fit.slope, 4) : "none") +
         " order=" + std::to_string(c.fit.certified_order);
}

std::string run_spectrum(const io::JobDoc& job, const fs::path& out, json& cert) {
  const io::SurfaceDoc& s = need_surface(job, "homogeneous");
  check_curvature(s.profile);
  auto range = job.options.range.value_or(std::pair<double, double>{0.5, 10.0});
  SpectralData sd = spectrum(s.profile.m, s.profile.P, range.first, range.second);
  auto rows = io::spectrum_rows(sd);
  io::write_spectrum_csv(out / "spectrum.csv", rows);
  BInvariants b = b_invariants(s.profile.m, s.profile.P);
  const int l = job.options.order.value_or(2);
  NonresonanceReport nr = nonresonance(b.b1, b.b2, s.profile.m, l);
  cert["profile"] = io::to_json(s.profile);
  cert["range"] = {range.first, range.second};
  cert["b1"] = b.b1;
  cert["b2"] = b.b2;
  cert["c_integral"] = b.c_integral;
  cert["b_error_estimate"] = b.error_estimate;
  cert["singular_intervals"] = json::array();
  for (auto& iv : b.singular_flags) cert["singular_intervals"].push_back({iv.lo, iv.hi});
  cert["curvature"] = curvature_json(curvature_margin(s.profile.m, s.profile.P));
  cert["eigenvalue_count"] = rows.size();
  cert["nonresonance"] = nonresonance_json(nr);
  return "floquet-spectrum m=" + fmt(s.profile.m) + ": " + std::to_string(rows.size()) + " periodic eigenvalues in [" +
         fmt(range.first) + "," + fmt(range.second) + "] b1=" + fmt(b.b1, 10) + " b2=" + fmt(b.b2, 10) +
         " nonresonance(order " + std::to_string(l) + ")=" + (nr.pass ? "pass" : "fail");
}

std::string run_bend(const io::JobDoc& job, const fs::path& out, json& cert) {
  const io::SurfaceDoc& s = need_surface(job, "homogeneous");
  check_curvature(s.profile);
  const io::Options& o = job.options;
  BendingOptions bo;
  bo.order = o.order.value_or(2);
  bo.smooth = o.smooth.value_or(0);
  bo.p = o.p.value_or(0);
  bo.tag = o.tag.value_or('-');
  bo.samples = o.samples.value_or(256);
  bo.enforce_nonresonance = o.enforce_nonresonance.value_or(true);
  BendingConstruction bc;
  try {
    bc = build_bending(s.profile.m, s.profile.P, bo);
  } catch (const ResonantExponent& e) {
    BInvariants b = b_invariants(s.profile.m, s.profile.P);
    json body = io::error_json(e);
    body["nonresonance"] = nonresonance_json(nonresonance(b.b1, b.b2, s.profile.m, bo.order));
    body["b1"] = b.b1;
    body["b2"] = b.b2;
    throw Failure{4, body};
  }
  std::vector<io::FieldDoc> docs;
  for (auto& f : bc.fields) docs.push_back(io::polar_field(f));
  io::write_json_file(out / "field.json", io::fields_to_json(docs));
  ParametricSurface surf = s.surface();
  DeformationFamily fam{surf, to_fields(bc.fields)};
  Certificate c = certify(fam, certify_options(o, {50, 50}, {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}, 1e-6));
  cert = to_json(c);
  cert["profile"] = io::to_json(s.profile);
  cert["domain"] = io::to_json(surf.domain());
  cert["lambda"] = bc.lambda_p;
  cert["j"] = bc.p;
  cert["tag"] = std::string(1, bc.tag);
  cert["multiplicity"] = bc.multiplicity;
  cert["b1"] = bc.b.b1;
  cert["b2"] = bc.b.b2;
  cert["forced_exponents"] = bc.forced_mu;
  cert["min_exponent"] = bc.min_exponent;
  cert["smooth"] = bo.smooth;
  cert["periodic_solve_residual"] = bc.max_solve_residual;
  cert["periodicity_error"] = bc.max_periodicity_error;
  cert["nonresonance"] = nonresonance_json(bc.nonresonance);
  return "floquet-bend m=" + fmt(s.profile.m) + " order=" + std::to_string(bo.order) + ": lambda_" +
         std::to_string(bc.p) + bc.tag + "=" + fmt(bc.lambda_p, 10) + " residual=" +
         fmt(*std::max_element(c.residual_max.begin(), c.residual_max.end()), 3) +
         " defect_slope=" + (std::isfinite(c.fit.slope) ? fmt(c.fit.slope, 4) : "none") +
         " order=" + std::to_string(c.fit.certified_order);
}

std::string run_verify(const io::JobDoc& job, json& cert, bool vekua) {
  const io::SurfaceDoc& s = need_surface(job, "");
  if (job.fields.empty()) throw Error(ErrorKind::SchemaError, "$: no fields given (\"fields\" or \"fields_file\")");
  const int order = job.options.order.value_or(static_cast<int>(job.fields.size()));
  if (order > static_cast<int>(job.fields.size()))
    throw Error(ErrorKind::MissingLowerOrderFields,
                "order " + std::to_string(order) + " needs " + std::to_string(order) + " fields");
  ParametricSurface surf = s.surface();
  DeformationFamily fam{surf, {}};
  for (int j = 0; j < order; ++j) fam.fields.push_back(job.fields[j].field());
  CertifyOptions co = certify_options(job.options, {21, 21}, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4}, 1e-8);
  co.vekua = co.vekua || vekua;
  Certificate c = certify(fam, co);
  cert = to_json(c);
  cert["surface_kind"] = s.kind;
  cert["domain"] = io::to_json(surf.domain());
  cert["fields"] = order;
  std::string line = std::string(vekua ? "reduce-vekua" : "verify") + " order=" + std::to_string(order) +
                     ": residual=" + fmt(*std::max_element(c.residual_max.begin(), c.residual_max.end()), 3) +
                     " defect_slope=" + (std::isfinite(c.fit.slope) ? fmt(c.fit.slope, 4) : "none") +
                     " order=" + std::to_string(c.fit.certified_order);
  if (c.triviality) line += std::string(" trivial=") + (c.triviality->trivial ? "true" : "false");
  if (!c.vekua.empty()) {
    double r = 0;
    int used = 0;
    for (auto& v : c.vekua) {
      r = std::max(r, v.max_residual);
      used = std::max(used, v.used);
    }
    line += " vekua_points=" + std::to_string(used) + " vekua_residual=" + fmt(r, 3);
  }
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bendkit: infinitesimal bendings of surfaces"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analytic", "exact power-series bending of z = s^(m+2) + eps t^(n+2)"},
      {"floquet-spectrum", "periodic Floquet spectrum of a homogeneous surface"},
      {"floquet-bend", "order-l bending of a homogeneous surface"},
      {"verify", "certify given fields on a surface"},
      {"reduce-vekua", "verify plus the Vekua residual on K > 0 points"}};
  for (auto& [name, desc] : commands) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("--in", f.in, "input JSON document")->required()->check(CLI::ExistingFile);
    sc->add_option("--out", f.out, "output directory")->required();
    sc->add_option("--trunc", f.trunc, "series truncation N");
    sc->add_option("--order", f.order, "bending order l");
    sc->add_option("--smooth", f.smooth, "minimum r-exponent k");
    sc->add_option("--range", f.range, "lambda range a,b")->delimiter(',')->expected(2);
    sc->add_option("--tol", f.tol, "residual tolerance");
    sc->add_option("--seed", f.seed, "seed for sampled points");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  CLI::App* sc = app.get_subcommands().front();
  const std::string cmd = sc->get_name();
  const fs::path out(f.out);
  json cert;
  std::string line;
  int code = 0;
  try {
    fs::create_directories(out);
    fs::path in(f.in);
    io::JobDoc job = io::job_from_json(io::read_json_file(in), in.parent_path());
    job.options = merged(job.options, f, *sc);
    if (cmd == "analytic")
      line = run_analytic(job, out, cert);
    else if (cmd == "floquet-spectrum")
      line = run_spectrum(job, out, cert);
    else if (cmd == "floquet-bend")
      line = run_bend(job, out, cert);
    else
      line = run_verify(job, cert, cmd == "reduce-vekua");
    cert["status"] = "ok";
  } catch (const Failure& e) {
    code = e.code;
    cert = e.body;
  } catch (const Error& e) {
    code = exit_code(e.kind());
    cert = io::error_json(e);
  } catch (const std::exception& e) {
    code = 1;
    cert = {{"error", "Internal"}, {"message", e.what()}};
  }
  cert["command"] = cmd;
  if (code != 0) {
    cert["status"] = "error";
    cert["exit_code"] = code;
    std::cerr << cert.dump() << "\n";
    line = cmd + ": error " + cert.value("error", std::string("Internal")) + " (exit " + std::to_string(code) + ")";
  }
  try {
    fs::create_directories(out);
    io::write_json_file(out / "certificate.json", cert);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    if (code == 0) code = 1;
  }
  std::cout << line << std::endl;
  return code;
}
