#pragma once

#include "neumann/critical.hpp"
#include "neumann/flow.hpp"

#include <cstdint>
#include <vector>

namespace neumann {

enum class DomainClass { Regular, Cracked, DoublyCracked };

const char* to_string(DomainClass c);

/// A Neumann line traversed from start to end (`forward`) or reversed.
struct HalfEdgeRef {
  int line = -1;
  bool forward = true;

  int half_edge() const { return 2 * line + (forward ? 0 : 1); }
  friend bool operator==(const HalfEdgeRef&, const HalfEdgeRef&) = default;
};

/// A line end at a critical point, seen from that point.
struct IncidentEnd {
  int line = -1;
  bool at_start = true;
  /// Angle of the line where it first leaves a small disc; defines the cyclic order.
  double order_angle = 0.0;
  /// Tangent direction at the critical point.
  double tangent_angle = 0.0;
};

struct Cusp {
  int critical = -1;
  /// Boundary half-edges arriving at / leaving the cusp point within the face walk.
  HalfEdgeRef incoming;
  HalfEdgeRef outgoing;
  double meeting_angle = 0.0;
  /// Hessian eigenvalue ratio.
  double exponent = 0.0;
  /// Log-log fit of the gap between the two boundary lines.
  double fitted_exponent = 0.0;
  double r_squared = 0.0;
  /// Fit passed the R^2 gate.
  bool confirmed = false;
};

struct NeumannDomain {
  /// Face walk with the domain on the left.
  std::vector<HalfEdgeRef> boundary;
  int max_point = -1;
  int min_point = -1;
  std::vector<int> saddles;
  DomainClass classification = DomainClass::Regular;
  std::vector<Cusp> cusps;
  std::vector<int> crack_lines;
  /// Boundary polygon in lifted coordinates, counter-clockwise.
  Polyline outline;
  double area = 0.0;
  Vec2 interior_point = Vec2::Zero();
};

struct NeumannComplex {
  MorseField field;
  std::vector<CriticalPoint> criticals;
  std::vector<NeumannLine> lines;
  std::vector<NeumannDomain> domains;
  /// Per critical point, incident line ends in counter-clockwise order.
  std::vector<std::vector<IncidentEnd>> incidence;
  bool morse_smale = true;

  int euler_characteristic() const {
    return static_cast<int>(criticals.size()) - static_cast<int>(lines.size()) +
           static_cast<int>(domains.size());
  }
};

struct ComplexOptions {
  CriticalOptions critical;
  FlowOptions flow;
  bool check_crossings = true;
  /// Flow random interior samples of each face to its extrema.
  bool verify_faces = true;
  int face_samples = 5;
  std::uint64_t seed = 20201;
  double cusp_angle_deg = 5.0;
  double cusp_min_r2 = 0.99;
  double cusp_fit_radius = 0.1;
  double cusp_fit_inner = 1e-3;
};

/// Critical points, Neumann lines, faces and their classification.
/// Throws LineCrossing, EulerMismatch or AssertionFailed on inconsistent input.
NeumannComplex build_complex(const MorseField& field, const ComplexOptions& opts = {});

/// Same, with a precomputed critical point inventory.
NeumannComplex build_complex(const MorseField& field, std::vector<CriticalPoint> criticals,
                             const ComplexOptions& opts = {});

/// Builds incidence, faces and classifications from already traced lines. Exposed
/// for hand-built complexes; no tracing or flow-based checks are performed.
NeumannComplex assemble_complex(const MorseField& field, std::vector<CriticalPoint> criticals,
                                std::vector<NeumannLine> lines, const ComplexOptions& opts = {});

int degree(const NeumannComplex& complex, int critical);

/// True iff no line joins two saddles.
bool is_morse_smale(const NeumannComplex& complex);

DomainClass classify_domain(const NeumannComplex& complex, const NeumannDomain& domain);

/// Angles between consecutive incident lines at a critical point, in
/// counter-clockwise order. They sum to 2pi. Throws DegreeTooSmall.
std::vector<double> angles_at(const NeumannComplex& complex, int critical);

/// Hessian eigenvalue ratio max|h|/min|h|. Throws ProportionalHessian.
double cusp_exponent(const CriticalPoint& c);

struct CuspFit {
  double slope = 0.0;
  double r_squared = 0.0;
  int samples = 0;
};

/// Log-log regression of the gap between two boundary lines leaving `critical`
/// along the slow Hessian direction, over radii in [inner, radius].
CuspFit fit_cusp_gap(const NeumannComplex& complex, int critical, int line_a, bool a_at_start,
                     int line_b, bool b_at_start, double inner, double radius);

/// Line polyline seen from the critical point at one of its ends, relative to it.
Polyline local_polyline(const NeumannComplex& complex, int line, bool at_start, bool use_raw = true);

/// Lifted samples of a half-edge, from its origin to its destination.
Polyline half_edge_samples(const NeumannComplex& complex, HalfEdgeRef he);

int origin_of(const NeumannComplex& complex, HalfEdgeRef he);

}  // namespace neumann
