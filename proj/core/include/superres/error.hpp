#pragma once

#include <stdexcept>
#include <string>

namespace superres {

/// Broad failure class; the CLI maps these onto its exit codes.
enum class ErrorKind {
  Validation,  ///< bad input or violated precondition
  Numerical,   ///< a computation failed to meet its tolerance
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Numerical failure that carries the quantity which missed its tolerance
/// (a quadrature residual, a solve residual, a tail mass, a condition number).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double diagnostic)
      : Error(ErrorKind::Numerical, what + " (diagnostic=" + format_diagnostic(diagnostic) + ")"),
        diagnostic_(diagnostic) {}
  double diagnostic() const noexcept { return diagnostic_; }

 private:
  static std::string format_diagnostic(double v);
  double diagnostic_;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CutoffError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace superres
