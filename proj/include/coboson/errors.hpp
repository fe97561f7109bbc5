// Error types thrown by the coboson library. Each maps to one contract
// failure; all derive from coboson::Error so callers can catch broadly.

#pragma once

#include <stdexcept>
#include <string>

namespace coboson {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- distribution construction ------------------------------------------------
struct EmptyInput : Error {
  using Error::Error;
};
struct NegativeCoefficient : Error {
  using Error::Error;
};
struct NotNormalized : Error {
  using Error::Error;
};

// -- parameter domains --------------------------------------------------------
struct OutOfRange : Error {
  using Error::Error;
};
struct InfeasiblePair : Error {
  using Error::Error;
};

// -- sampling -----------------------------------------------------------------
struct SamplingExhausted : Error {
  using Error::Error;
};

// -- chi engines --------------------------------------------------------------
struct CancellationFailure : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct Undefined : Error {
  using Error::Error;
};

// -- extremal constructions ---------------------------------------------------
struct DegeneratePeaked : Error {
  using Error::Error;
};
struct STooSmall : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct TouchesLambda1 : Error {
  using Error::Error;
};

// -- bounds -------------------------------------------------------------------
struct NotApplicable : Error {
  using Error::Error;
};
// Raised when the proven bound ordering fails beyond tolerance: an internal
// consistency failure, never a user error.
struct HierarchyViolation : Error {
  using Error::Error;
};

}  // namespace coboson
