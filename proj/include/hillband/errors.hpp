#pragma once

#include <stdexcept>
#include <string>

namespace hillband {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request exceeds a configured budget (jet order, expansion order).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation (z = 0, a point inside a closed gap, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The ODE integrator could not reach the end of the period.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing ran out of range before the requested number of gaps was found.
class BracketError : public Error {
 public:
  BracketError(const std::string& what, int found) : Error(what), found_(found) {}
  int found() const { return found_; }

 private:
  int found_;
};

/// Computed data violates a structural invariant (interlacing, ordering).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// z sits on a Dirichlet eigenvalue momentum: M(z) has a pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace hillband
