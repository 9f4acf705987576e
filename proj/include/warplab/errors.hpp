#pragma once

#include <stdexcept>
#include <string>

namespace warplab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Query outside a tabulated range (grid, support, sweep).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// ODE integration failure; carries the abscissa where it happened.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t)
      : Error(what + " (t = " + std::to_string(t) + ")"), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace warplab
