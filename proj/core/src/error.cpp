#include "neumann/error.hpp"

namespace neumann {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotMorse: return "NotMorse";
    case ErrorCode::SeedGridTooCoarse: return "SeedGridTooCoarse";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SteppedOutOfTolerance: return "SteppedOutOfTolerance";
    case ErrorCode::LineCrossing: return "LineCrossing";
    case ErrorCode::EulerMismatch: return "EulerMismatch";
    case ErrorCode::UnknownCriticalPoint: return "UnknownCriticalPoint";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::ProportionalHessian: return "ProportionalHessian";
    case ErrorCode::ExceptionalLevel: return "ExceptionalLevel";
    case ErrorCode::MeshQualityFailure: return "MeshQualityFailure";
    case ErrorCode::SelfIntersectingBoundary: return "SelfIntersectingBoundary";
    case ErrorCode::SolverBreakdown: return "SolverBreakdown";
    case ErrorCode::NonSPDMass: return "NonSPDMass";
    case ErrorCode::SpectrumTooShort: return "SpectrumTooShort";
    case ErrorCode::AmbiguousCluster: return "AmbiguousCluster";
    case ErrorCode::NotAnEigenfunctionField: return "NotAnEigenfunctionField";
    case ErrorCode::PatchContainsCriticalPoint: return "PatchContainsCriticalPoint";
    case ErrorCode::AmplitudeTooSmall: return "AmplitudeTooSmall";
    case ErrorCode::PatchTooLarge: return "PatchTooLarge";
    case ErrorCode::ConstructionFailed: return "ConstructionFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AssertionFailed: return "AssertionFailed";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::UnknownCriticalPoint:
    case ErrorCode::PatchContainsCriticalPoint:
    case ErrorCode::AmplitudeTooSmall:
    case ErrorCode::PatchTooLarge:
      return ErrorClass::Config;
    case ErrorCode::ConstructionFailed:
    case ErrorCode::AssertionFailed:
    case ErrorCode::EulerMismatch:
    case ErrorCode::LineCrossing:
      return ErrorClass::Assertion;
    default:
      return ErrorClass::Numerical;
  }
}

}  // namespace neumann
