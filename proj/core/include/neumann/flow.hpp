#pragma once

#include "neumann/critical.hpp"

#include <array>
#include <span>
#include <vector>

namespace neumann {

/// Forward follows -grad f (f decreasing); backward follows +grad f.
enum class FlowDirection { Forward, Backward };

struct FlowOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double launch_offset = 1e-6;
  double capture_radius = 1e-4;
  /// Saddles capture a line only if the gradient component along their
  /// expanding direction is below this gate.
  double gradient_gate = 1e-6;
  double max_length = 100.0 * kTwoPi;
  double line_spacing = 1e-3;
  /// Upper bound on the arclength covered by a single accepted step.
  double max_step_arc = 1e-3;
  long max_steps = 5'000'000;
};

struct StopRule {
  std::span<const CriticalPoint> criticals;
  /// Critical point the trajectory starts next to; ignored until the line leaves it.
  int exclude = -1;
  FlowOptions options;
};

struct FlowLine {
  /// Lifted samples at uniform arclength spacing; first point is the start.
  Polyline samples;
  /// Lifted integrator output (plus exact start/end critical points when known).
  Polyline raw;
  int start_critical = -1;
  int end_critical = -1;
  /// Lifted position of the terminal point; equals criticals[end].position + 2pi*winding.
  Vec2 end_lift = Vec2::Zero();
  std::array<int, 2> end_winding{0, 0};
  FlowDirection direction = FlowDirection::Forward;
  double length = 0.0;
  /// Last integrated point before the linearised completion to the critical point.
  Vec2 capture_point = Vec2::Zero();
};

struct NeumannLine {
  FlowLine path;
  int saddle = -1;
  /// Saddle Hessian eigenvector index (0: negative eigenvalue) and launch sign.
  int eigen_index = 0;
  int sign = 1;

  int start() const { return path.start_critical; }
  int end() const { return path.end_critical; }
  const Polyline& samples() const { return path.samples; }
};

/// Integrates x' = -/+ grad f from the lifted point `x0` until capture by a
/// critical point. Throws NoConvergence / SteppedOutOfTolerance.
FlowLine integrate_flow(const MorseField& field, const Vec2& x0, FlowDirection direction,
                        const StopRule& stop);

/// The four lines leaving saddle `saddle_index`, ordered by (eigen index, sign).
std::array<NeumannLine, 4> trace_neumann_lines(const MorseField& field,
                                               std::span<const CriticalPoint> criticals,
                                               int saddle_index, const FlowOptions& opts = {});

}  // namespace neumann
