#pragma once

#include <stdexcept>
#include <string>

namespace qkpse {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested ordering parameter lies in the singular Glauber-Sudarshan
// regime or otherwise cannot back an evaluator.
struct OrderingInfeasible : Error {
  using Error::Error;
};

struct SymmetryViolation : Error {
  using Error::Error;
};

struct PhysicalityViolation : Error {
  using Error::Error;
};

struct PositiveDefiniteViolation : Error {
  using Error::Error;
};

struct SingularConditioning : Error {
  using Error::Error;
};

struct GuardViolation : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

struct RejectionStall : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

}  // namespace qkpse
