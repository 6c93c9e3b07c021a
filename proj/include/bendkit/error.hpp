#pragma once

#include <stdexcept>
#include <string>

namespace bendkit {

enum class ErrorKind {
  InvalidArgument,
  DegenerateParametrization,
  MissingLowerOrderFields,
  DegenerateSampleSet,
  NegativeCurvature,
  FlatPointDegeneracy,
  SingularConversion,
  NonIntegrableCoefficient,
  IntegratorFailure,
  RangeTooCoarse,
  ResonantForcing,
  ResonantExponent,
  SmoothnessUnreachable,
  CurvatureViolation,
  NotDivisible,
  NotInSolutionForm,
  CompatibilityFailure,
  ParseError,
  SchemaError,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateParametrization: return "DegenerateParametrization";
    case ErrorKind::MissingLowerOrderFields: return "MissingLowerOrderFields";
    case ErrorKind::DegenerateSampleSet: return "DegenerateSampleSet";
    case ErrorKind::NegativeCurvature: return "NegativeCurvature";
    case ErrorKind::FlatPointDegeneracy: return "FlatPointDegeneracy";
    case ErrorKind::SingularConversion: return "SingularConversion";
    case ErrorKind::NonIntegrableCoefficient: return "NonIntegrableCoefficient";
    case ErrorKind::IntegratorFailure: return "IntegratorFailure";
    case ErrorKind::RangeTooCoarse: return "RangeTooCoarse";
    case ErrorKind::ResonantForcing: return "ResonantForcing";
    case ErrorKind::ResonantExponent: return "ResonantExponent";
    case ErrorKind::SmoothnessUnreachable: return "SmoothnessUnreachable";
    case ErrorKind::CurvatureViolation: return "CurvatureViolation";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::NotInSolutionForm: return "NotInSolutionForm";
    case ErrorKind::CompatibilityFailure: return "CompatibilityFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// offending exponent of f'' below z^m
class NotDivisible : public Error {
public:
  explicit NotDivisible(int exponent)
      : Error(ErrorKind::NotDivisible,
              "coefficient of z^" + std::to_string(exponent) + " in f'' is nonzero"),
        exponent(exponent) {}
  int exponent;
};

class NotInSolutionForm : public Error {
public:
  NotInSolutionForm(int i, int j, const std::string& why)
      : Error(ErrorKind::NotInSolutionForm,
              "coefficient (" + std::to_string(i) + "," + std::to_string(j) + "): " + why),
        i(i), j(j) {}
  int i, j;
};

class ResonantExponent : public Error {
public:
  ResonantExponent(double exponent, const std::string& why)
      : Error(ErrorKind::ResonantExponent, why), exponent(exponent) {}
  double exponent;
};

}  // namespace bendkit
