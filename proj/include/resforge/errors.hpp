#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace resforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on variable count or grading.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user input (files, parameters).
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Invalid obstacle configuration (overlap, non-convexity, uncertified minimum).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A ray meets an obstacle tangentially.
class GlancingError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Linearized return map is not strictly hyperbolic.
class HyperbolicityError : public Error {
 public:
  using Error::Error;
};

/// Taylor germ extraction failed its residual check.
class GermFitError : public Error {
 public:
  GermFitError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Degree-by-degree solver met a non-invertible homological operator.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Small divisor below threshold in the normal form construction.
class NearResonanceError : public Error {
 public:
  using Error::Error;
};

/// Newton oracle did not converge or is ill-conditioned.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace resforge
