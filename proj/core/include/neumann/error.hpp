#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace neumann {

/// Failure classes raised by the pipeline. Each maps onto a CLI exit code
/// family through `error_class`.
enum class ErrorCode {
  InvalidArgument,
  // morse
  NotMorse,
  SeedGridTooCoarse,
  // flow
  NoConvergence,
  SteppedOutOfTolerance,
  // complex
  LineCrossing,
  EulerMismatch,
  UnknownCriticalPoint,
  DegreeTooSmall,
  ProportionalHessian,
  // spectra
  ExceptionalLevel,
  MeshQualityFailure,
  SelfIntersectingBoundary,
  SolverBreakdown,
  NonSPDMass,
  SpectrumTooShort,
  AmbiguousCluster,
  NotAnEigenfunctionField,
  // cracked
  PatchContainsCriticalPoint,
  AmplitudeTooSmall,
  PatchTooLarge,
  ConstructionFailed,
  // io / cli
  ParseError,
  AssertionFailed,
};

enum class ErrorClass { Config, Numerical, Assertion };

std::string_view to_string(ErrorCode code);
ErrorClass error_class(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace neumann
