#pragma once

#include <stdexcept>
#include <string>

namespace nsqp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the problem's working box.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An oracle returned a non-finite value or malformed output.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition (dimensions, signs).
class ContractError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class LineSearchFailure : public Error {
 public:
  using Error::Error;
};

/// An optional oracle (e.g. constraint Hessians) is required but absent.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Parameters fail the inequalities a diagnostic relies on.
class PremiseError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

class CatalogError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed trace or configuration text.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsqp
