#include "vortex/errors.hpp"

namespace vortex {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AngularCollision: return "AngularCollision";
    case ErrorKind::NotCritical: return "NotCritical";
    case ErrorKind::InvalidN: return "InvalidN";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::CollisionApproach: return "CollisionApproach";
    case ErrorKind::VortexCollision: return "VortexCollision";
    case ErrorKind::DegenerateSeed: return "DegenerateSeed";
    case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorKind::InsufficientFamily: return "InsufficientFamily";
    case ErrorKind::JacobianUnstable: return "JacobianUnstable";
    case ErrorKind::CollisionAbort: return "CollisionAbort";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace vortex
