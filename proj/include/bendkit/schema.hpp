#pragma once

#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace bendkit {

// JSON Schema (draft-07 subset) for every document the CLI reads
inline constexpr const char* kJobSchema = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "bendkit job",
  "definitions": {
    "rational": {"type": "string", "pattern": "^\\s*[+-]?([0-9]+(/[0-9]+)?|[0-9]*\\.[0-9]+|[0-9]+\\.[0-9]*)\\s*$"},
    "scalar": {"oneOf": [{"type": "number"}, {"$ref": "#/definitions/rational"}]},
    "numbers": {"type": "array", "items": {"type": "number"}},
    "domain": {
      "type": "object",
      "additionalProperties": false,
      "minProperties": 1,
      "maxProperties": 1,
      "properties": {
        "rectangle": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "annulus": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 2, "maxItems": 2}
      }
    },
    "univariate": {
      "type": "object",
      "additionalProperties": false,
      "required": ["coeffs"],
      "properties": {
        "var": {"type": "string"},
        "coeffs": {
          "type": "object",
          "additionalProperties": false,
          "patternProperties": {"^[0-9]+$": {"$ref": "#/definitions/rational"}}
        },
        "trunc": {"type": "integer", "minimum": -1}
      }
    },
    "bivariate": {
      "type": "object",
      "additionalProperties": false,
      "required": ["coeffs"],
      "properties": {
        "var": {"type": "string"},
        "coeffs": {
          "type": "object",
          "additionalProperties": false,
          "patternProperties": {"^[0-9]+,[0-9]+$": {"$ref": "#/definitions/rational"}}
        },
        "trunc": {"type": "array", "items": {"type": "integer", "minimum": -1}, "minItems": 2, "maxItems": 2}
      }
    },
    "poly_table": {
      "type": "object",
      "additionalProperties": false,
      "patternProperties": {"^[0-9]+,[0-9]+$": {"$ref": "#/definitions/scalar"}}
    },
    "polar_component": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["exponent", "cos"],
        "properties": {
          "exponent": {"type": "number"},
          "cos": {"$ref": "#/definitions/numbers"},
          "sin": {"$ref": "#/definitions/numbers"}
        }
      }
    },
    "profile": {
      "type": "object",
      "additionalProperties": false,
      "required": ["m", "cos"],
      "properties": {
        "m": {"type": "number", "minimum": 2},
        "cos": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "sin": {"$ref": "#/definitions/numbers"},
        "options": {"$ref": "#/definitions/options"}
      }
    },
    "surface": {
      "oneOf": [
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "z"],
          "properties": {"kind": {"const": "graph-expr"}, "z": {"type": "string"}, "domain": {"$ref": "#/definitions/domain"}}
        },
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "coeffs"],
          "properties": {
            "kind": {"const": "graph-poly"},
            "coeffs": {"$ref": "#/definitions/poly_table"},
            "domain": {"$ref": "#/definitions/domain"}
          }
        },
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "m", "cos"],
          "properties": {
            "kind": {"const": "homogeneous"},
            "m": {"type": "number", "minimum": 2},
            "cos": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "sin": {"$ref": "#/definitions/numbers"},
            "domain": {"$ref": "#/definitions/domain"}
          }
        },
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "m", "n", "eps"],
          "properties": {
            "kind": {"const": "smn"},
            "m": {"type": "integer", "minimum": 0},
            "n": {"type": "integer", "minimum": 0},
            "eps": {"enum": [1, -1]},
            "domain": {"$ref": "#/definitions/domain"}
          }
        }
      ]
    },
    "field": {
      "oneOf": [
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "u", "v", "w"],
          "properties": {
            "kind": {"const": "series"},
            "u": {"$ref": "#/definitions/bivariate"},
            "v": {"$ref": "#/definitions/bivariate"},
            "w": {"$ref": "#/definitions/bivariate"}
          }
        },
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "u", "v", "w"],
          "properties": {
            "kind": {"const": "expr"},
            "u": {"type": "string"},
            "v": {"type": "string"},
            "w": {"type": "string"}
          }
        },
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "u", "v", "w"],
          "properties": {
            "kind": {"const": "poly"},
            "u": {"$ref": "#/definitions/poly_table"},
            "v": {"$ref": "#/definitions/poly_table"},
            "w": {"$ref": "#/definitions/poly_table"}
          }
        },
        {
          "type": "object",
          "additionalProperties": false,
          "required": ["kind", "u", "v", "w"],
          "properties": {
            "kind": {"const": "polar"},
            "u": {"$ref": "#/definitions/polar_component"},
            "v": {"$ref": "#/definitions/polar_component"},
            "w": {"$ref": "#/definitions/polar_component"}
          }
        }
      ]
    },
    "quad": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "h1": {"$ref": "#/definitions/univariate"},
        "h2": {"$ref": "#/definitions/univariate"},
        "h3": {"$ref": "#/definitions/univariate"},
        "h4": {"$ref": "#/definitions/univariate"}
      }
    },
    "options": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "trunc": {"type": "integer", "minimum": 0},
        "order": {"type": "integer", "minimum": 1},
        "smooth": {"type": "number", "minimum": 0},
        "range": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 2, "maxItems": 2},
        "eps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 4},
        "p": {"type": "integer", "minimum": 1},
        "tag": {"enum": ["-", "+"]},
        "samples": {"type": "integer", "minimum": 16},
        "points": {"type": "integer", "minimum": 1},
        "vekua": {"type": "boolean"},
        "enforce_nonresonance": {"type": "boolean"}
      }
    },
    "job": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "surface": {"$ref": "#/definitions/surface"},
        "quad": {"$ref": "#/definitions/quad"},
        "fields": {"type": "array", "items": {"$ref": "#/definitions/field"}},
        "fields_file": {"type": "string"},
        "options": {"$ref": "#/definitions/options"}
      }
    },
    "fields_document": {
      "type": "object",
      "additionalProperties": false,
      "required": ["fields"],
      "properties": {"fields": {"type": "array", "items": {"$ref": "#/definitions/field"}}}
    }
  },
  "oneOf": [{"$ref": "#/definitions/job"}, {"$ref": "#/definitions/profile"}]
})json";

inline const nlohmann::json& job_schema() {
  static const nlohmann::json s = nlohmann::json::parse(kJobSchema);
  return s;
}

namespace detail {

class SchemaValidator {
public:
  explicit SchemaValidator(const nlohmann::json& root) : root_(root) {}

  void validate(const nlohmann::json& x, const nlohmann::json& s, const std::string& path,
                std::vector<std::string>& errs) const {
    if (s.contains("$ref")) {
      validate(x, resolve(s["$ref"].get<std::string>()), path, errs);
      return;
    }
    if (s.contains("type") && !type_ok(x, s["type"])) {
      errs.push_back(path + ": expected " + s["type"].dump());
      return;
    }
    if (s.contains("const") && x != s["const"]) errs.push_back(path + ": expected " + s["const"].dump());
    if (s.contains("enum")) {
      bool hit = false;
      for (auto& e : s["enum"]) hit = hit || e == x;
      if (!hit) errs.push_back(path + ": not one of " + s["enum"].dump());
    }
    if (x.is_number()) {
      double v = x.get<double>();
      if (s.contains("minimum") && v < s["minimum"].get<double>())
        errs.push_back(path + ": below minimum " + s["minimum"].dump());
      if (s.contains("exclusiveMinimum") && v <= s["exclusiveMinimum"].get<double>())
        errs.push_back(path + ": must exceed " + s["exclusiveMinimum"].dump());
    }
    if (x.is_string() && s.contains("pattern") &&
        !std::regex_search(x.get<std::string>(), std::regex(s["pattern"].get<std::string>())))
      errs.push_back(path + ": malformed value " + x.dump());
    if (x.is_array()) array(x, s, path, errs);
    if (x.is_object()) object(x, s, path, errs);
    if (s.contains("oneOf")) one_of(x, s["oneOf"], path, errs);
  }

private:
  const nlohmann::json& resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) throw Error(ErrorKind::SchemaError, "unsupported reference " + ref);
    return root_.at(nlohmann::json::json_pointer(ref.substr(1)));
  }

  static bool type_ok(const nlohmann::json& x, const nlohmann::json& t) {
    if (t.is_array()) {
      for (auto& e : t)
        if (type_ok(x, e)) return true;
      return false;
    }
    const std::string n = t.get<std::string>();
    if (n == "object") return x.is_object();
    if (n == "array") return x.is_array();
    if (n == "string") return x.is_string();
    if (n == "boolean") return x.is_boolean();
    if (n == "number") return x.is_number();
    if (n == "integer") return x.is_number_integer() || (x.is_number_float() && std::trunc(x.get<double>()) == x.get<double>());
    if (n == "null") return x.is_null();
    return false;
  }

  void array(const nlohmann::json& x, const nlohmann::json& s, const std::string& path, std::vector<std::string>& errs) const {
    if (s.contains("minItems") && x.size() < s["minItems"].get<std::size_t>())
      errs.push_back(path + ": needs at least " + s["minItems"].dump() + " items");
    if (s.contains("maxItems") && x.size() > s["maxItems"].get<std::size_t>())
      errs.push_back(path + ": allows at most " + s["maxItems"].dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < x.size(); ++i) validate(x[i], s["items"], path + "[" + std::to_string(i) + "]", errs);
  }

  void object(const nlohmann::json& x, const nlohmann::json& s, const std::string& path, std::vector<std::string>& errs) const {
    if (s.contains("required"))
      for (auto& r : s["required"])
        if (!x.contains(r.get<std::string>())) errs.push_back(path + ": missing key \"" + r.get<std::string>() + "\"");
    if (s.contains("minProperties") && x.size() < s["minProperties"].get<std::size_t>())
      errs.push_back(path + ": needs at least " + s["minProperties"].dump() + " keys");
    if (s.contains("maxProperties") && x.size() > s["maxProperties"].get<std::size_t>())
      errs.push_back(path + ": allows at most " + s["maxProperties"].dump() + " keys");
    for (auto it = x.begin(); it != x.end(); ++it) {
      const std::string sub = path + "." + it.key();
      bool matched = false;
      if (s.contains("properties") && s["properties"].contains(it.key())) {
        matched = true;
        validate(it.value(), s["properties"][it.key()], sub, errs);
      }
      if (s.contains("patternProperties"))
        for (auto p = s["patternProperties"].begin(); p != s["patternProperties"].end(); ++p)
          if (std::regex_search(it.key(), std::regex(p.key()))) {
            matched = true;
            validate(it.value(), p.value(), sub, errs);
          }
      if (!matched && s.contains("additionalProperties")) {
        const auto& ap = s["additionalProperties"];
        if (ap.is_boolean() && !ap.get<bool>())
          errs.push_back(path + ": unknown key \"" + it.key() + "\"");
        else if (ap.is_object())
          validate(it.value(), ap, sub, errs);
      }
    }
  }

  // alternatives tagged by a "kind" const are selected directly for readable messages
  void one_of(const nlohmann::json& x, const nlohmann::json& alts, const std::string& path, std::vector<std::string>& errs) const {
    if (x.is_object() && x.contains("kind")) {
      for (auto& a : alts) {
        const nlohmann::json& r = a.contains("$ref") ? resolve(a["$ref"].get<std::string>()) : a;
        if (r.contains("properties") && r["properties"].contains("kind") && r["properties"]["kind"].contains("const") &&
            r["properties"]["kind"]["const"] == x["kind"]) {
          validate(x, r, path, errs);
          return;
        }
      }
    }
    int hits = 0;
    std::vector<std::string> first;
    for (auto& a : alts) {
      std::vector<std::string> e;
      validate(x, a, path, e);
      if (e.empty())
        ++hits;
      else if (first.empty() || e.size() < first.size())
        first = e;
    }
    if (hits == 1) return;
    if (hits == 0)
      errs.insert(errs.end(), first.begin(), first.end());
    else
      errs.push_back(path + ": matches more than one alternative");
  }

  const nlohmann::json& root_;
};

}  // namespace detail

// throws SchemaError listing every violation; definition = "" validates against the root
inline void validate_document(const nlohmann::json& doc, const std::string& definition = "") {
  const nlohmann::json& root = job_schema();
  const nlohmann::json& s = definition.empty() ? root : root.at("definitions").at(definition);
  std::vector<std::string> errs;
  detail::SchemaValidator(root).validate(doc, s, "$", errs);
  if (errs.empty()) return;
  std::string msg;
  for (std::size_t i = 0; i < errs.size() && i < 8; ++i) msg += (i ? "; " : "") + errs[i];
  throw Error(ErrorKind::SchemaError, msg);
}

}  // namespace bendkit
