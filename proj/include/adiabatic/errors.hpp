#pragma once

#include <stdexcept>
#include <string>

namespace adiabatic {

// Base of every error the library throws. Callers that only need a message
// can catch this; the CLI maps each subclass onto its own exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A precondition on the arguments was violated (mismatched jet orders,
// negative tolerances, wrong vector sizes).
class ContractError : public Error {
public:
  using Error::Error;
};

// Parameters fall outside the region where an operation is defined,
// e.g. a power series evaluated beyond its radius of convergence.
class DomainError : public Error {
public:
  using Error::Error;
};

// Reciprocal of a jet whose constant term vanishes.
class SingularJetError : public DomainError {
public:
  using DomainError::DomainError;
};

// A quantity that must be real came out with a significant imaginary part.
class ConsistencyError : public DomainError {
public:
  using DomainError::DomainError;
};

// An iterative method ran out of its iteration budget.
class NumericalError : public Error {
public:
  using Error::Error;
};

class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}

  double time() const noexcept { return time_; }

private:
  double time_;
};

class DegeneracyError : public Error {
public:
  DegeneracyError(const std::string& what, std::size_t level_a, std::size_t level_b)
      : Error(what), level_a_(level_a), level_b_(level_b) {}

  std::size_t level_a() const noexcept { return level_a_; }
  std::size_t level_b() const noexcept { return level_b_; }

private:
  std::size_t level_a_;
  std::size_t level_b_;
};

// The eigenvector continuing the tracked level could not be identified.
class ContinuationError : public Error {
public:
  using Error::Error;
};

// Reading or writing a file failed.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace adiabatic
