#include "neumann/invariants.hpp"

#include "neumann/error.hpp"
#include "neumann/io.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace neumann {

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

CriticalKind mirrored(CriticalKind k) {
  switch (k) {
    case CriticalKind::Minimum: return CriticalKind::Maximum;
    case CriticalKind::Maximum: return CriticalKind::Minimum;
    default: return CriticalKind::Saddle;
  }
}

}  // namespace

bool InvariantReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

InvariantReport verify_invariants(const MorseField& field, const ComplexOptions& opts) {
  InvariantReport r;
  auto check = [&](const std::string& name, bool passed, const std::string& detail = {}) {
    r.checks.push_back({name, passed, detail});
  };

  NeumannComplex cx = build_complex(field, opts);
  const auto counts = count_kinds(cx.criticals);
  check("euler relation on critical points", euler_check(cx.criticals),
        std::to_string(counts.minima) + " - " + std::to_string(counts.saddles) + " + " +
            std::to_string(counts.maxima));
  check("euler relation on the complex", cx.euler_characteristic() == 0,
        "V - E + F = " + std::to_string(cx.euler_characteristic()));

  // f -> -f swaps maxima and minima and keeps every line and face.
  {
    const NeumannComplex neg = build_complex(field.negated(), opts);
    bool same = neg.criticals.size() == cx.criticals.size() && neg.lines.size() == cx.lines.size() &&
                neg.domains.size() == cx.domains.size();
    std::vector<int> image(cx.criticals.size(), -1);
    for (std::size_t i = 0; same && i < cx.criticals.size(); ++i) {
      image[i] = find_critical_near(neg.criticals, cx.criticals[i].position, 1e-8);
      same = image[i] >= 0 && neg.criticals[image[i]].kind == mirrored(cx.criticals[i].kind);
    }
    double worst = 0.0;
    for (std::size_t l = 0; same && l < cx.lines.size(); ++l) {
      const auto& a = cx.lines[l];
      bool found = false;
      for (const auto& b : neg.lines) {
        if (b.saddle != image[a.saddle] || b.end() != image[a.end()]) continue;
        if (torus_distance(a.samples()[1], b.samples()[1]) > 5e-4) continue;
        found = true;
        worst = std::max(worst, std::abs(a.path.length - b.path.length) / a.path.length);
      }
      same = found;
    }
    std::vector<double> areas_a, areas_b;
    for (const auto& d : cx.domains) areas_a.push_back(d.area);
    for (const auto& d : neg.domains) areas_b.push_back(d.area);
    std::sort(areas_a.begin(), areas_a.end());
    std::sort(areas_b.begin(), areas_b.end());
    for (std::size_t i = 0; same && i < areas_a.size(); ++i) {
      worst = std::max(worst, std::abs(areas_a[i] - areas_b[i]) / areas_a[i]);
    }
    check("complex symmetric under f -> -f", same && worst < 1e-6, "max relative difference " + fmt(worst));
  }

  // Detection is a fixed point: a second run and Newton restarted at the
  // results both return the same inventory.
  {
    const auto again = find_critical_points(field, opts.critical);
    bool same = again.size() == cx.criticals.size();
    double drift = 0.0;
    for (std::size_t i = 0; same && i < again.size(); ++i) {
      same = again[i].kind == cx.criticals[i].kind && again[i].position == cx.criticals[i].position;
      Vec2 x = cx.criticals[i].position;
      for (int it = 0; it < 5; ++it) x -= field.hessian(x).inverse() * field.gradient(x);
      drift = std::max(drift, torus_distance(x, cx.criticals[i].position));
      same = same && classify_critical_point(field, wrap_point(x), opts.critical).kind == cx.criticals[i].kind;
    }
    check("critical point detection idempotent", same && drift < 1e-10, "max Newton drift " + fmt(drift));
  }

  {
    double worst = 0.0;
    int skipped = 0;
    for (std::size_t i = 0; i < cx.criticals.size(); ++i) {
      if (degree(cx, static_cast<int>(i)) < 2) {
        ++skipped;
        continue;
      }
      double sum = 0.0;
      for (double a : angles_at(cx, static_cast<int>(i))) sum += a;
      worst = std::max(worst, std::abs(sum - kTwoPi));
    }
    check("angle sums equal 2pi", worst < 1e-9,
          "max deviation " + fmt(worst) + (skipped ? ", " + std::to_string(skipped) + " degree-1 points skipped" : ""));
  }

  {
    const std::string first = dump(complex_to_json(cx));
    const std::string second = dump(complex_to_json(build_complex(field, opts)));
    check("repeated reports byte-identical", first == second, std::to_string(first.size()) + " bytes");
  }

  r.complex = std::move(cx);
  return r;
}

}  // namespace neumann
