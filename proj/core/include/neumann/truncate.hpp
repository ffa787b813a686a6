#pragma once

#include "neumann/mesh.hpp"

#include <vector>

namespace neumann {

/// Domain with the neighbourhoods of its cusped extrema cut off along level lines.
struct TruncatedDomain {
  int parent = -1;
  double t = 0.0;
  /// Level line f = t f(max) near a cusped maximum (empty if the maximum is not a cusp).
  Polyline gamma_plus;
  /// Level line f = t f(min) near a cusped minimum.
  Polyline gamma_minus;
  DomainGeometry geometry;
  /// Angles between each level line and the retained boundary at its two ends.
  std::vector<double> end_angles;

  bool unchanged() const { return gamma_plus.empty() && gamma_minus.empty(); }
};

/// Truncation Omega_t. Throws InvalidArgument for t outside (0,1) or when the
/// extremal values do not straddle zero, ExceptionalLevel when a level line runs
/// through a saddle or does not close up across the domain.
TruncatedDomain truncate_domain(const NeumannComplex& complex, int domain, double t,
                                double h_min = 1e-3);

struct CuspDecay {
  double t = 0.0;
  double length_plus = 0.0;
  double length_minus = 0.0;
  /// Lengths divided by sqrt(1 - t).
  double normalized_plus = 0.0;
  double normalized_minus = 0.0;
};

/// Normalised level-line lengths near the cusps of a domain. Throws
/// InvalidArgument when the domain has no cusp.
std::vector<CuspDecay> cusp_length_decay(const NeumannComplex& complex, int domain,
                                         const std::vector<double>& ts);

}  // namespace neumann
