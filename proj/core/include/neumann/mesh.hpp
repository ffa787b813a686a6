#pragma once

#include "neumann/complex.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace neumann {

enum class BoundaryMarker { Boundary, GammaPlus, GammaMinus, CrackLeft, CrackRight };

const char* to_string(BoundaryMarker m);

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  BoundaryMarker marker = BoundaryMarker::Boundary;
};

struct TriMesh {
  std::vector<Vec2> vertices;
  /// Counter-clockwise vertex triples.
  std::vector<std::array<int, 3>> triangles;
  /// Boundary edges oriented with the mesh on their left.
  std::vector<BoundaryEdge> boundary_edges;
  /// For slit copies, the vertex they were split from; identity elsewhere.
  std::vector<int> origin;
  double h = 0.0;
  double grading = 1.0;
  std::optional<double> t;

  double area() const;
  /// Smallest interior angle (radians) over all triangles.
  double min_angle() const;
  double smallest_edge() const;
};

/// Planar straight-line graph for one domain, in lifted coordinates.
struct DomainGeometry {
  /// Outer boundary, counter-clockwise, not repeating the first point.
  Polyline outer;
  /// Marker of segment outer[i] -> outer[i+1].
  std::vector<BoundaryMarker> markers;
  /// Indices into `outer` that must be kept as mesh vertices (corners).
  std::vector<std::size_t> corners;
  /// Critical point at each corner, or -1.
  std::vector<int> corner_critical;
  /// Interior crack lines, each from its point on `outer` to its free tip.
  std::vector<Polyline> slits;
  /// Cusp points and the radius of the thin neighbourhood around each.
  std::vector<Vec2> cusps;
  std::vector<double> cusp_radii;
};

struct MeshOptions {
  double h = 0.1;
  /// Geometric growth factor of element size away from a cusp.
  double grading = 1.3;
  /// Smallest target element size as a fraction of h.
  double h_min_ratio = 1.0 / 64.0;
  double min_angle_deg = 15.0;
  /// Target for the refinement loop; kept above `min_angle_deg`.
  double refine_angle_deg = 20.0;
  std::optional<double> truncate;
  std::size_t max_vertices = 400000;
};

/// Boundary geometry of a traced domain, with crack lines split off as slits and
/// each cusp tip cut where the domain becomes thinner than the smallest element
/// (unless `cut_cusps` is false).
DomainGeometry domain_geometry(const NeumannComplex& complex, int domain, double h_min,
                               bool cut_cusps = true);

/// Conforming triangulation of a domain geometry. Throws SelfIntersectingBoundary
/// or MeshQualityFailure.
TriMesh mesh_geometry(const DomainGeometry& geometry, const MeshOptions& opts);

/// Meshes one Neumann domain, optionally truncated at level t near cusped extrema.
TriMesh mesh_domain(const NeumannComplex& complex, int domain, const MeshOptions& opts);

/// Meshes a simple counter-clockwise polygon (corners kept, edges resampled).
TriMesh mesh_polygon(const Polyline& polygon, const MeshOptions& opts);

}  // namespace neumann
