#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct ConfigurationError : Error {
  using Error::Error;
};

// Flux ratio reached 1 at an interior radius: no classical solution with this
// right-hand side.
struct SupercriticalFlux : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct NoConvergence : NumericalError {
  using NumericalError::NumericalError;
};

struct InconsistencyError : NumericalError {
  using NumericalError::NumericalError;
};

struct NoFold : NumericalError {
  using NumericalError::NumericalError;
};

struct DistanceTooSmall : NumericalError {
  using NumericalError::NumericalError;
};

struct BarrierUnavailable : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace pmc
