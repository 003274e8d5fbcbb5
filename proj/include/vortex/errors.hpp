#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vortex {

enum class ErrorKind {
  AngularCollision,
  NotCritical,
  InvalidN,
  NotSymmetric,
  ConvergenceFailure,
  SingularBlock,
  DimensionMismatch,
  NoConvergence,
  CollisionApproach,
  VortexCollision,
  DegenerateSeed,
  InvalidEpsilon,
  InsufficientFamily,
  JacobianUnstable,
  CollisionAbort,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; `kind()` lets callers
// (and the CLI's exit-code mapping) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace vortex
