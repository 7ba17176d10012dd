#pragma once

#include <stdexcept>
#include <string>

namespace mvgt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or layer widths that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration (radii, fold counts, parameter bundles).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Coincident atoms in a Coulomb matrix.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A record is well-formed JSON but lacks a required field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// The oracle predictor is not representable in the graph-tuple filter span.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace mvgt
