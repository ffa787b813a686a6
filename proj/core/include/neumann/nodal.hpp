#pragma once

#include "neumann/complex.hpp"

#include <vector>

namespace neumann {

/// A connected component of the zero set, as a lifted polyline. For closed
/// components the last point equals the first shifted by `period` (zero for
/// contractible loops, a nonzero multiple of 2pi per axis otherwise).
struct NodalLine {
  Polyline points;
  bool closed = true;
  Vec2 period = Vec2::Zero();
};

/// Zero contours of f by marching squares on a res x res periodic lattice.
/// Cells whose centre value vanishes (nodal crossings at saddles) are split
/// straight through so that crossing curves stay separate.
std::vector<NodalLine> nodal_set(const MorseField& field, int grid_res = 256);

struct NodalCrossing {
  Vec2 point = Vec2::Zero();
  /// Acute angle between the nodal and Neumann lines, in [0, pi/2].
  double angle = 0.0;
  int line = -1;
  int nodal = -1;
  /// Saddle index when the crossing happens at a saddle on the zero set, else -1.
  int saddle = -1;
};

/// Meeting angles between the nodal set and the Neumann lines.
std::vector<NodalCrossing> nodal_neumann_angles(const NeumannComplex& complex,
                                                const std::vector<NodalLine>& nodal,
                                                int grid_res = 256);

}  // namespace neumann
