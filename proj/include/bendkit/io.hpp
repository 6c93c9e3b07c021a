#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "homogeneous_bending.hpp"
#include "schema.hpp"
#include "series_bendings.hpp"
#include "surface.hpp"

namespace bendkit::io {

using json = nlohmann::json;

inline std::string rational_string(const Rational& q) { return q.get_str(); }

inline Exponent2 parse_pair_key(const std::string& k) {
  auto c = k.find(',');
  return {std::stoi(k.substr(0, c)), std::stoi(k.substr(c + 1))};
}

inline std::string pair_key(const Exponent2& e) { return std::to_string(e.first) + "," + std::to_string(e.second); }

// ---- series ----

inline json to_json(const UnivariateSeries& s, const std::string& var = "t") {
  json c = json::object();
  for (auto& [k, v] : s.coeffs()) c[std::to_string(k)] = rational_string(v);
  json j = {{"var", var}, {"coeffs", c}};
  if (!s.exact()) j["trunc"] = s.trunc();
  return j;
}

inline UnivariateSeries univariate_from_json(const json& j) {
  validate_document(j, "univariate");
  UnivariateSeries s(j.value("trunc", kExact));
  for (auto it = j["coeffs"].begin(); it != j["coeffs"].end(); ++it)
    s.set(std::stoi(it.key()), parse_rational(it.value().get<std::string>()));
  return s;
}

inline json to_json(const BivariateSeries& s, const std::string& var = "x,y") {
  json c = json::object();
  for (auto& [e, v] : s.coeffs()) c[pair_key(e)] = rational_string(v);
  json j = {{"var", var}, {"coeffs", c}};
  if (!s.exact()) j["trunc"] = {s.trunc_x(), s.trunc_y()};
  return j;
}

inline BivariateSeries bivariate_from_json(const json& j) {
  validate_document(j, "bivariate");
  int tx = kExact, ty = kExact;
  if (j.contains("trunc")) {
    tx = j["trunc"][0].get<int>();
    ty = j["trunc"][1].get<int>();
  }
  BivariateSeries s(tx, ty);
  for (auto it = j["coeffs"].begin(); it != j["coeffs"].end(); ++it) {
    auto e = parse_pair_key(it.key());
    s.set(e.first, e.second, parse_rational(it.value().get<std::string>()));
  }
  return s;
}

inline json to_json(const GeneratorQuad& q) {
  return {{"h1", to_json(q.h1)}, {"h2", to_json(q.h2)}, {"h3", to_json(q.h3)}, {"h4", to_json(q.h4)}};
}

inline GeneratorQuad quad_from_json(const json& j) {
  validate_document(j, "quad");
  GeneratorQuad q;
  auto get = [&](const char* k) { return j.contains(k) ? univariate_from_json(j[k]) : UnivariateSeries(); };
  q.h1 = get("h1");
  q.h2 = get("h2");
  q.h3 = get("h3");
  q.h4 = get("h4");
  return q;
}

// ---- profiles and polar fields ----

struct Profile {
  double m = 2;
  PeriodicProfile P;
  bool operator==(const Profile& o) const { return m == o.m && P == o.P; }
};

inline PeriodicProfile profile_from_arrays(const json& j) {
  std::vector<double> a = j["cos"].get<std::vector<double>>();
  std::vector<double> b = j.contains("sin") ? j["sin"].get<std::vector<double>>() : std::vector<double>{};
  if (!b.empty() && b[0] != 0) throw Error(ErrorKind::SchemaError, "sin[0] must be 0");
  return PeriodicProfile(a, b);
}

inline json to_json(const Profile& p) {
  return {{"m", p.m}, {"cos", p.P.cos_coeffs()}, {"sin", p.P.sin_coeffs()}};
}

inline Profile profile_from_json(const json& j) {
  validate_document(j, "profile");
  return {j["m"].get<double>(), profile_from_arrays(j)};
}

inline json to_json(const PolarFunction& f) {
  json a = json::array();
  for (auto& t : f.terms())
    a.push_back({{"exponent", t.exponent}, {"cos", t.profile.cos_coeffs()}, {"sin", t.profile.sin_coeffs()}});
  return a;
}

inline PolarFunction polar_from_json(const json& j) {
  validate_document(j, "polar_component");
  PolarFunction f;
  for (auto& t : j) f.add(t["exponent"].get<double>(), profile_from_arrays(t));
  return f;
}

// ---- expression grammar ----
// expr := ['+'|'-'] term (('+'|'-') term)*; term := factor ('*' factor)*; factor := base ('^' uint)?
// base := 's' | 't' | number | '(' expr ')'; number := digits ['/' digits | '.' digits]

class ExpressionParser {
public:
  explicit ExpressionParser(std::string text) : s_(std::move(text)) {}

  BivariateSeries parse() {
    BivariateSeries r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::ParseError, "expression \"" + s_ + "\" at column " + std::to_string(pos_ + 1) + ": " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  BivariateSeries expr() {
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    BivariateSeries r = term();
    if (neg) r = -r;
    for (;;) {
      if (eat('+'))
        r += term();
      else if (eat('-'))
        r += -term();
      else
        return r;
    }
  }

  BivariateSeries term() {
    BivariateSeries r = factor();
    while (eat('*')) r = r * factor();
    return r;
  }

  BivariateSeries factor() {
    BivariateSeries b = base();
    if (!eat('^')) return b;
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a non-negative integer");
    int k = std::stoi(s_.substr(start, pos_ - start));
    if (k > 200) fail("exponent too large");
    BivariateSeries r;
    r.set(0, 0, 1);
    for (int i = 0; i < k; ++i) r = r * b;
    return r;
  }

  BivariateSeries base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    BivariateSeries r;
    if (c == 's' || c == 't') {
      ++pos_;
      if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) fail("unknown identifier");
      r.set(c == 's', c == 't', 1);
      return r;
    }
    if (c == '(') {
      ++pos_;
      r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        std::size_t d = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (d == pos_) fail("expected denominator");
      }
      Rational q;
      try {
        q = parse_rational(s_.substr(start, pos_ - start));
      } catch (const Error&) {
        fail("malformed number");
      }
      r.set(0, 0, q);
      return r;
    }
    fail("expected s, t, a number or '('");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

// exact polynomial; x-index is the power of s, y-index the power of t
inline BivariateSeries parse_expression(const std::string& text) { return ExpressionParser(text).parse(); }

// ---- fields ----

struct FieldDoc {
  enum class Kind { Series, Expr, Poly, Polar };
  Kind kind = Kind::Series;
  std::array<BivariateSeries, 3> series;  // Series and Expr
  std::array<std::string, 3> expr;
  std::array<std::map<Exponent2, double>, 3> poly;
  PolarField polar;

  VectorField3 field() const {
    switch (kind) {
      case Kind::Series:
      case Kind::Expr:
        return VectorField3::polynomial(Poly2(series[0]), Poly2(series[1]), Poly2(series[2]));
      case Kind::Poly:
        return VectorField3::polynomial(Poly2(poly[0]), Poly2(poly[1]), Poly2(poly[2]));
      case Kind::Polar:
        return VectorField3::polar(polar);
    }
    return VectorField3::zero();
  }
};

inline FieldDoc series_field(const std::array<BivariateSeries, 3>& c) {
  FieldDoc d;
  d.kind = FieldDoc::Kind::Series;
  d.series = c;
  return d;
}

inline FieldDoc poly_field(const std::array<std::map<Exponent2, double>, 3>& c) {
  FieldDoc d;
  d.kind = FieldDoc::Kind::Poly;
  d.poly = c;
  return d;
}

inline FieldDoc polar_field(const PolarField& f) {
  FieldDoc d;
  d.kind = FieldDoc::Kind::Polar;
  d.polar = f;
  return d;
}

inline json poly_table_to_json(const std::map<Exponent2, double>& t) {
  json j = json::object();
  for (auto& [e, v] : t) j[pair_key(e)] = v;
  return j;
}

inline std::map<Exponent2, double> poly_table_from_json(const json& j) {
  validate_document(j, "poly_table");
  std::map<Exponent2, double> t;
  for (auto it = j.begin(); it != j.end(); ++it)
    t[parse_pair_key(it.key())] = it.value().is_string() ? parse_rational(it.value().get<std::string>()).get_d()
                                                         : it.value().get<double>();
  return t;
}

inline json to_json(const FieldDoc& f) {
  static const char* names[3] = {"u", "v", "w"};
  json j;
  switch (f.kind) {
    case FieldDoc::Kind::Series:
      j["kind"] = "series";
      for (int i = 0; i < 3; ++i) j[names[i]] = to_json(f.series[i], "s,t");
      break;
    case FieldDoc::Kind::Expr:
      j["kind"] = "expr";
      for (int i = 0; i < 3; ++i) j[names[i]] = f.expr[i];
      break;
    case FieldDoc::Kind::Poly:
      j["kind"] = "poly";
      for (int i = 0; i < 3; ++i) j[names[i]] = poly_table_to_json(f.poly[i]);
      break;
    case FieldDoc::Kind::Polar:
      j["kind"] = "polar";
      j["u"] = to_json(f.polar.u);
      j["v"] = to_json(f.polar.v);
      j["w"] = to_json(f.polar.w);
      break;
  }
  return j;
}

inline FieldDoc field_from_json(const json& j) {
  validate_document(j, "field");
  static const char* names[3] = {"u", "v", "w"};
  FieldDoc f;
  const std::string kind = j["kind"];
  for (int i = 0; i < 3; ++i) {
    const json& c = j[names[i]];
    if (kind == "series") {
      f.kind = FieldDoc::Kind::Series;
      f.series[i] = bivariate_from_json(c);
    } else if (kind == "expr") {
      f.kind = FieldDoc::Kind::Expr;
      f.expr[i] = c.get<std::string>();
      f.series[i] = parse_expression(f.expr[i]);
    } else if (kind == "poly") {
      f.kind = FieldDoc::Kind::Poly;
      f.poly[i] = poly_table_from_json(c);
    }
  }
  if (kind == "polar") {
    f.kind = FieldDoc::Kind::Polar;
    f.polar = {polar_from_json(j["u"]), polar_from_json(j["v"]), polar_from_json(j["w"])};
  }
  return f;
}

inline bool operator==(const PolarFunction& a, const PolarFunction& b) {
  if (a.terms().size() != b.terms().size()) return false;
  for (std::size_t i = 0; i < a.terms().size(); ++i)
    if (a.terms()[i].exponent != b.terms()[i].exponent || !(a.terms()[i].profile == b.terms()[i].profile)) return false;
  return true;
}

inline bool operator==(const FieldDoc& a, const FieldDoc& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FieldDoc::Kind::Series:
      return a.series[0].identical(b.series[0]) && a.series[1].identical(b.series[1]) && a.series[2].identical(b.series[2]);
    case FieldDoc::Kind::Expr:
      return a.expr == b.expr;
    case FieldDoc::Kind::Poly:
      return a.poly == b.poly;
    case FieldDoc::Kind::Polar:
      return a.polar.u == b.polar.u && a.polar.v == b.polar.v && a.polar.w == b.polar.w;
  }
  return false;
}

inline json fields_to_json(const std::vector<FieldDoc>& fs) {
  json a = json::array();
  for (auto& f : fs) a.push_back(to_json(f));
  return {{"fields", a}};
}

inline std::vector<FieldDoc> fields_from_json(const json& j) {
  validate_document(j, "fields_document");
  std::vector<FieldDoc> out;
  for (auto& f : j["fields"]) out.push_back(field_from_json(f));
  return out;
}

// ---- surfaces ----

inline json to_json(const Domain& d) {
  if (d.kind == Domain::Kind::Annulus) return {{"annulus", {d.a0, d.a1}}};
  return {{"rectangle", {d.a0, d.a1, d.b0, d.b1}}};
}

inline Domain domain_from_json(const json& j) {
  validate_document(j, "domain");
  if (j.contains("annulus")) return Domain::annulus(j["annulus"][0], j["annulus"][1]);
  auto r = j["rectangle"];
  return Domain::rectangle(r[0], r[1], r[2], r[3]);
}

struct SurfaceDoc {
  std::string kind;
  std::string z_expr;
  std::map<Exponent2, double> table;  // graph-expr and graph-poly
  Profile profile;                    // homogeneous
  int m = 0, n = 0, eps = 1;          // smn
  std::optional<Domain> domain;

  Domain effective_domain() const {
    if (domain) return *domain;
    if (kind == "homogeneous") return Domain::annulus(0.5, 1.0);
    if (kind == "smn") {
      ScalingTriple sc = scaling_triple(m, n);
      double c = 0.5 * radius_constant(m, n);
      return Domain::rectangle(-c / sc.P, c / sc.P, -c / sc.Q, c / sc.Q);
    }
    return Domain::rectangle(-1, 1, -1, 1);
  }

  ParametricSurface surface() const {
    Domain d = effective_domain();
    if (kind == "homogeneous") return ParametricSurface::homogeneous(profile.m, profile.P, d);
    if (kind == "smn") {
      Poly2 z = Poly2::monomial(m + 2, 0) + Poly2::monomial(0, n + 2, eps);
      return ParametricSurface::graph(z, d);
    }
    return ParametricSurface::graph(Poly2(table), d);
  }
};

inline SurfaceDoc surface_from_json(const json& j) {
  validate_document(j, "surface");
  SurfaceDoc s;
  s.kind = j["kind"];
  if (s.kind == "graph-expr") {
    s.z_expr = j["z"];
    BivariateSeries z = parse_expression(s.z_expr);
    for (auto& [e, v] : z.coeffs()) s.table[e] = v.get_d();
  } else if (s.kind == "graph-poly") {
    s.table = poly_table_from_json(j["coeffs"]);
  } else if (s.kind == "homogeneous") {
    s.profile = {j["m"].get<double>(), profile_from_arrays(j)};
  } else {
    s.m = j["m"];
    s.n = j["n"];
    s.eps = j["eps"];
  }
  if (j.contains("domain")) s.domain = domain_from_json(j["domain"]);
  return s;
}

// ---- options and jobs ----

struct Options {
  std::optional<int> trunc, order, seed, p, samples, points;
  std::optional<double> smooth, tol;
  std::optional<std::pair<double, double>> range;
  std::optional<std::array<int, 2>> grid;
  std::optional<std::vector<double>> eps;
  std::optional<char> tag;
  std::optional<bool> vekua, enforce_nonresonance;
};

inline Options options_from_json(const json& j) {
  validate_document(j, "options");
  Options o;
  auto num = [&](const char* k, auto& slot) {
    if (j.contains(k)) slot = j[k].get<typename std::decay_t<decltype(slot)>::value_type>();
  };
  num("trunc", o.trunc);
  num("order", o.order);
  num("seed", o.seed);
  num("p", o.p);
  num("samples", o.samples);
  num("points", o.points);
  num("smooth", o.smooth);
  num("tol", o.tol);
  num("vekua", o.vekua);
  num("enforce_nonresonance", o.enforce_nonresonance);
  if (j.contains("range")) o.range = {j["range"][0].get<double>(), j["range"][1].get<double>()};
  if (j.contains("grid")) o.grid = std::array<int, 2>{j["grid"][0].get<int>(), j["grid"][1].get<int>()};
  if (j.contains("eps")) o.eps = j["eps"].get<std::vector<double>>();
  if (j.contains("tag")) o.tag = j["tag"].get<std::string>()[0];
  if (o.range && !(o.range->second > o.range->first)) throw Error(ErrorKind::SchemaError, "$.range: need a < b");
  return o;
}

struct JobDoc {
  std::optional<SurfaceDoc> surface;
  std::optional<GeneratorQuad> quad;
  std::vector<FieldDoc> fields;
  Options options;
};

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError,
                path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

// a bare profile document {"m", "cos", "sin"} is read as a homogeneous surface
inline JobDoc job_from_json(const json& j, const std::filesystem::path& base_dir = ".") {
  validate_document(j);
  JobDoc job;
  if (j.contains("m") && j.contains("cos")) {
    SurfaceDoc s;
    s.kind = "homogeneous";
    s.profile = profile_from_json(j);
    job.surface = s;
    if (j.contains("options")) job.options = options_from_json(j["options"]);
    return job;
  }
  if (j.contains("surface")) job.surface = surface_from_json(j["surface"]);
  if (j.contains("quad")) job.quad = quad_from_json(j["quad"]);
  if (j.contains("fields"))
    for (auto& f : j["fields"]) job.fields.push_back(field_from_json(f));
  if (j.contains("fields_file")) {
    auto extra = fields_from_json(read_json_file(base_dir / j["fields_file"].get<std::string>()));
    job.fields.insert(job.fields.end(), extra.begin(), extra.end());
  }
  if (j.contains("options")) job.options = options_from_json(j["options"]);
  return job;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// ---- spectrum CSV ----

struct SpectrumRow {
  int j = 0;
  char tag = '-';
  double lambda = 0, asymptotic = 0, gap = 0;
  bool operator==(const SpectrumRow&) const = default;
};

inline std::string format17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<SpectrumRow> spectrum_rows(const SpectralData& sd) {
  std::vector<SpectrumRow> rows;
  for (auto& e : sd.eigenvalues) {
    double gap = 0;
    for (auto& o : sd.eigenvalues)
      if (o.j == e.j && o.tag != e.tag) gap = std::abs(o.value - e.value);
    rows.push_back({e.j, e.tag, e.value, asymptotic_eigenvalue(e.j, sd.b1, sd.b2), gap});
  }
  return rows;
}

inline void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << "j,tag,lambda,asymptotic,gap\n";
  for (auto& r : rows)
    out << r.j << "," << r.tag << "," << format17(r.lambda) << "," << format17(r.asymptotic) << "," << format17(r.gap)
        << "\n";
}

inline std::vector<SpectrumRow> read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  if (line != "j,tag,lambda,asymptotic,gap") throw Error(ErrorKind::ParseError, "unexpected CSV header");
  std::vector<SpectrumRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f[5];
    for (auto& x : f) std::getline(ss, x, ',');
    rows.push_back({std::stoi(f[0]), f[1].empty() ? '?' : f[1][0], std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
  }
  return rows;
}

inline json error_json(const Error& e) { return {{"error", kind_name(e.kind())}, {"message", e.what()}}; }

}  // namespace bendkit::io
