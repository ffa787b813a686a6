#include "neumann/flow.hpp"

#include "neumann/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace neumann {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Capture {
  int index = -1;
};

// Sinks of the integration direction capture on entering the radius; saddles
// only when the expanding gradient component is below the gate.
Capture check_capture(const Vec2& x, FlowDirection dir, const StopRule& stop, bool excluded_active) {
  const auto& opts = stop.options;
  for (std::size_t i = 0; i < stop.criticals.size(); ++i) {
    if (excluded_active && static_cast<int>(i) == stop.exclude) continue;
    const auto& cp = stop.criticals[i];
    const Vec2 d = torus_delta(cp.position, x);
    if (d.norm() >= opts.capture_radius) continue;
    if (cp.kind == CriticalKind::Saddle) {
      const int grow = dir == FlowDirection::Forward ? 0 : 1;
      const double expanding = std::abs(cp.hess_eigenvalues[grow] * d.dot(cp.hess_eigenvectors[grow]));
      if (expanding > opts.gradient_gate) continue;
      return {static_cast<int>(i)};
    }
    const bool sink = (dir == FlowDirection::Forward) == (cp.kind == CriticalKind::Minimum);
    if (sink) return {static_cast<int>(i)};
  }
  return {};
}

}  // namespace

FlowLine integrate_flow(const MorseField& field, const Vec2& x0, FlowDirection direction,
                        const StopRule& stop) {
  const auto& opts = stop.options;
  const double sgn = direction == FlowDirection::Forward ? -1.0 : 1.0;
  auto rhs = [&](const Vec2& x) -> Vec2 { return sgn * field.gradient(x); };

  FlowLine line;
  line.direction = direction;
  line.start_critical = stop.exclude;

  Vec2 y = x0;
  Vec2 k1 = rhs(y);
  if (k1.norm() <= 1e-14) {
    throw Error(ErrorCode::InvalidArgument, "flow started at a critical point");
  }
  line.raw.push_back(y);

  bool excluded_active = stop.exclude >= 0;
  double length = 0.0;
  double dt = std::min(1e-2, opts.max_step_arc / k1.norm());
  long steps = 0;
  int rejects_in_row = 0;
  Capture cap = check_capture(y, direction, stop, excluded_active);

  while (cap.index < 0) {
    if (++steps > opts.max_steps || length > opts.max_length) {
      std::ostringstream msg;
      msg << "flow from (" << x0.x() << ", " << x0.y() << ") not captured after length " << length;
      throw Error(ErrorCode::NoConvergence, msg.str());
    }
    const Vec2 k2 = rhs(y + dt * (a21 * k1));
    const Vec2 k3 = rhs(y + dt * (a31 * k1 + a32 * k2));
    const Vec2 k4 = rhs(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 = rhs(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = rhs(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec2 ynew = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec2 k7 = rhs(ynew);
    const Vec2 errv = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(errv[i]) / sc);
    }
    const double arc = (ynew - y).norm();
    const bool too_long = arc > opts.max_step_arc;
    if (err > 1.0 || too_long || !std::isfinite(err)) {
      double shrink = err > 1.0 && std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.2;
      if (too_long) shrink = std::min(shrink, 0.9 * opts.max_step_arc / arc);
      dt *= shrink;
      if (++rejects_in_row > 60 || dt < 1e-14) {
        throw Error(ErrorCode::SteppedOutOfTolerance, "step size underflow in gradient flow");
      }
      continue;
    }
    rejects_in_row = 0;
    y = ynew;
    k1 = k7;
    length += arc;
    line.raw.push_back(y);
    const double grow = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    dt *= std::max(1.0, grow);

    if (excluded_active &&
        torus_distance(stop.criticals[stop.exclude].position, y) > 10.0 * opts.capture_radius) {
      excluded_active = false;
    }
    cap = check_capture(y, direction, stop, excluded_active);
  }

  const auto& target = stop.criticals[cap.index];
  line.capture_point = y;
  line.end_critical = cap.index;
  // One-step completion along the linearised flow to the critical point itself.
  line.end_lift = nearest_lift(target.position, y);
  length += (line.end_lift - y).norm();
  line.raw.push_back(line.end_lift);
  const Vec2 w = (line.end_lift - target.position) / kTwoPi;
  line.end_winding = {static_cast<int>(std::lround(w.x())), static_cast<int>(std::lround(w.y()))};
  line.length = length;
  line.samples = resample_uniform(line.raw, opts.line_spacing);
  return line;
}

std::array<NeumannLine, 4> trace_neumann_lines(const MorseField& field,
                                               std::span<const CriticalPoint> criticals,
                                               int saddle_index, const FlowOptions& opts) {
  if (saddle_index < 0 || saddle_index >= static_cast<int>(criticals.size())) {
    throw Error(ErrorCode::UnknownCriticalPoint, "saddle index out of range");
  }
  const auto& saddle = criticals[saddle_index];
  if (saddle.kind != CriticalKind::Saddle) {
    throw Error(ErrorCode::InvalidArgument, "trace_neumann_lines needs a saddle");
  }
  StopRule stop{criticals, saddle_index, opts};
  std::array<NeumannLine, 4> lines;
  int k = 0;
  for (int eig = 0; eig < 2; ++eig) {
    // Negative eigenvalue: f decreases away from the saddle, so follow -grad.
    const FlowDirection dir = eig == 0 ? FlowDirection::Forward : FlowDirection::Backward;
    for (int sign : {1, -1}) {
      const Vec2 x0 = saddle.position + sign * opts.launch_offset * saddle.hess_eigenvectors[eig];
      NeumannLine nl;
      nl.path = integrate_flow(field, x0, dir, stop);
      nl.path.start_critical = saddle_index;
      nl.path.raw.insert(nl.path.raw.begin(), saddle.position);
      nl.path.length += opts.launch_offset;
      nl.path.samples = resample_uniform(nl.path.raw, opts.line_spacing);
      nl.saddle = saddle_index;
      nl.eigen_index = eig;
      nl.sign = sign;
      lines[k++] = std::move(nl);
    }
  }
  return lines;
}

}  // namespace neumann
