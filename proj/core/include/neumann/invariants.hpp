#pragma once

#include "neumann/check.hpp"
#include "neumann/complex.hpp"

#include <vector>

namespace neumann {

struct InvariantReport {
  std::vector<Check> checks;
  NeumannComplex complex;

  bool ok() const;
};

/// Structural invariants of the pipeline on one field: Euler relation, the
/// f -> -f symmetry of the complex, idempotent critical point detection, angle
/// sums at every critical point and byte-identical repeated reports. Failures are
/// recorded, not thrown.
InvariantReport verify_invariants(const MorseField& field, const ComplexOptions& opts = {});

}  // namespace neumann
