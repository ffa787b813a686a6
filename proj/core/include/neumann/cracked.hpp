#pragma once

#include "neumann/check.hpp"
#include "neumann/complex.hpp"
#include "neumann/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace neumann {

struct CrackOptions {
  /// Bump amplitude; defaults to twice the crossing threshold so that min alpha = -2A.
  std::optional<double> amplitude;
  /// Allowed deviation of the base field from its linearisation over the patch,
  /// relative to the linear variation across the patch.
  double linearity_tol = 0.05;
  /// Reverse the bump to create a minimum and a saddle instead.
  bool reversed = false;
};

/// Smallest amplitude K with max |alpha| = A.
double crack_threshold_amplitude(double slope);

/// Patch and bump for a crack centred at `center` with half-width `scale`, frame
/// aligned with the base gradient. Throws PatchContainsCriticalPoint,
/// AmplitudeTooSmall or PatchTooLarge.
CrackPerturbation make_crack_perturbation(const MorseField& field, const Vec2& center, double scale,
                                          const CrackOptions& opts = {});

/// The base field with the perturbation added.
MorseField build_crack_perturbation(const MorseField& field, const Vec2& center, double scale,
                                    const CrackOptions& opts = {});

struct CrackedReport {
  std::vector<Check> checks;
  /// New extremum and saddle (indices into `complex.criticals`).
  int new_extremum = -1;
  int new_saddle = -1;
  int cracked_domains = 0;
  /// The crack: the single Neumann line into the new extremum.
  int crack_line = -1;
  double max_outside_difference = 0.0;
  NeumannComplex complex;

  bool ok() const;
};

/// Runs critical-point detection and the complex on a perturbed field and checks
/// the crack construction. Throws ConstructionFailed naming the first failed check.
CrackedReport verify_cracked(const MorseField& field_tilde, const ComplexOptions& opts = {});

}  // namespace neumann
