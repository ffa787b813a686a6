#include "neumann/io.hpp"

#include "neumann/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace neumann {

namespace {

Json point(const Vec2& p) { return Json::array({p.x(), p.y()}); }

Vec2 to_point(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ParseError, "expected a 2-vector");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json polyline(const Polyline& pts) {
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(point(p));
  return out;
}

template <class T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace

MorseField field_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("modes") || !j["modes"].is_array()) {
    throw Error(ErrorCode::ParseError, "field needs a \"modes\" array");
  }
  std::vector<Mode> modes;
  for (const auto& m : j["modes"]) {
    Mode md;
    md.amplitude = required<double>(m, "a");
    md.m = required<int>(m, "m");
    md.n = required<int>(m, "n");
    md.phase = m.contains("theta") ? required<double>(m, "theta") : 0.0;
    modes.push_back(md);
  }
  std::vector<CrackPerturbation> perts;
  if (j.contains("perturbations")) {
    for (const auto& p : j["perturbations"]) {
      CrackPerturbation c;
      c.center = to_point(p.at("center"));
      c.axis = to_point(p.at("axis"));
      c.scale = required<double>(p, "scale");
      c.slope = p.contains("slope") ? required<double>(p, "slope") : 0.0;
      c.amplitude = required<double>(p, "K");
      perts.push_back(c);
    }
  }
  if (modes.empty()) throw Error(ErrorCode::ParseError, "field has no modes");
  return MorseField(std::move(modes), std::move(perts));
}

Json field_to_json(const MorseField& field) {
  Json j;
  j["modes"] = Json::array();
  for (const auto& m : field.modes()) {
    j["modes"].push_back({{"a", m.amplitude}, {"m", m.m}, {"n", m.n}, {"theta", m.phase}});
  }
  j["perturbations"] = Json::array();
  for (const auto& p : field.perturbations()) {
    j["perturbations"].push_back({{"center", point(p.center)},
                                  {"axis", point(p.axis)},
                                  {"scale", p.scale},
                                  {"slope", p.slope},
                                  {"K", p.amplitude}});
  }
  return j;
}

MorseField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open field file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return field_from_json(j);
}

Json criticals_to_json(std::span<const CriticalPoint> criticals) {
  Json out = Json::array();
  for (std::size_t i = 0; i < criticals.size(); ++i) {
    const auto& c = criticals[i];
    out.push_back({{"index", i},
                   {"kind", to_string(c.kind)},
                   {"position", point(c.position)},
                   {"value", c.value},
                   {"hessian_eigenvalues", {c.hess_eigenvalues[0], c.hess_eigenvalues[1]}},
                   {"proportional_hessian", c.hess_proportional},
                   {"degree", c.degree}});
  }
  return out;
}

Json complex_to_json(const NeumannComplex& cx, double spacing) {
  Json j;
  j["field"] = field_to_json(cx.field);
  j["counts"] = {{"vertices", cx.criticals.size()},
                 {"edges", cx.lines.size()},
                 {"faces", cx.domains.size()},
                 {"euler", cx.euler_characteristic()}};
  j["morse_smale"] = cx.morse_smale;
  j["criticals"] = criticals_to_json(cx.criticals);
  j["lines"] = Json::array();
  for (std::size_t i = 0; i < cx.lines.size(); ++i) {
    const auto& l = cx.lines[i];
    const Polyline pts = spacing > 0.0 ? resample_uniform(l.samples(), spacing) : l.samples();
    j["lines"].push_back({{"index", i},
                          {"saddle", l.saddle},
                          {"start", l.start()},
                          {"end", l.end()},
                          {"length", l.path.length},
                          {"points", polyline(pts)}});
  }
  j["faces"] = Json::array();
  for (std::size_t i = 0; i < cx.domains.size(); ++i) {
    const auto& d = cx.domains[i];
    Json boundary = Json::array();
    for (const auto& he : d.boundary) boundary.push_back({{"line", he.line}, {"forward", he.forward}});
    Json cusps = Json::array();
    for (const auto& c : d.cusps) {
      cusps.push_back({{"critical", c.critical},
                       {"meeting_angle", c.meeting_angle},
                       {"exponent", c.exponent},
                       {"fitted_exponent", c.fitted_exponent},
                       {"r_squared", c.r_squared},
                       {"confirmed", c.confirmed}});
    }
    j["faces"].push_back({{"index", i},
                          {"class", to_string(d.classification)},
                          {"max", d.max_point},
                          {"min", d.min_point},
                          {"saddles", d.saddles},
                          {"crack_lines", d.crack_lines},
                          {"area", d.area},
                          {"interior_point", point(d.interior_point)},
                          {"boundary", boundary},
                          {"cusps", cusps}});
  }
  return j;
}

Json spectrum_report_to_json(const SpectrumReport& r) {
  Json j;
  j["mu"] = r.mu;
  j["lambda"] = r.lambda;
  j["position"] = r.position;
  j["cluster"] = r.cluster;
  j["residual"] = r.residual ? Json(*r.residual) : Json(nullptr);
  j["distance"] = r.distance;
  j["cluster_tol"] = r.cluster_tol;
  j["mesh"] = {{"h", r.h},
               {"grading", r.grading},
               {"t", r.t ? Json(*r.t) : Json(nullptr)},
               {"vertices", r.vertices},
               {"triangles", r.triangles}};
  return j;
}

Json checks_to_json(std::span<const Check> checks) {
  Json j = Json::array();
  for (const auto& c : checks) j.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j;
}

Json crack_report_to_json(const CrackedReport& r) {
  Json j;
  j["ok"] = r.ok();
  j["checks"] = checks_to_json(r.checks);
  j["new_extremum"] = r.new_extremum;
  j["new_saddle"] = r.new_saddle;
  j["crack_line"] = r.crack_line;
  j["cracked_domains"] = r.cracked_domains;
  j["max_outside_difference"] = r.max_outside_difference;
  return j;
}

Json invariant_report_to_json(const InvariantReport& r) {
  Json j;
  j["ok"] = r.ok();
  j["checks"] = checks_to_json(r.checks);
  return j;
}

Json truncation_to_json(const TruncatedDomain& d) {
  Json j;
  j["parent"] = d.parent;
  j["t"] = d.t;
  j["unchanged"] = d.unchanged();
  j["gamma_plus_length"] = d.gamma_plus.empty() ? 0.0 : polyline_length(d.gamma_plus);
  j["gamma_minus_length"] = d.gamma_minus.empty() ? 0.0 : polyline_length(d.gamma_minus);
  j["end_angles"] = d.end_angles;
  return j;
}

void write_off(const TriMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << " 0\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Json mesh_markers_to_json(const TriMesh& mesh) {
  Json j;
  j["h"] = mesh.h;
  j["grading"] = mesh.grading;
  j["t"] = mesh.t ? Json(*mesh.t) : Json(nullptr);
  j["boundary_edges"] = Json::array();
  for (const auto& e : mesh.boundary_edges) {
    j["boundary_edges"].push_back({{"a", e.a}, {"b", e.b}, {"marker", to_string(e.marker)}});
  }
  Json copies = Json::array();
  for (std::size_t i = 0; i < mesh.origin.size(); ++i) {
    if (mesh.origin[i] != static_cast<int>(i)) copies.push_back({{"vertex", i}, {"origin", mesh.origin[i]}});
  }
  j["slit_copies"] = copies;
  return j;
}

std::string complex_svg(const NeumannComplex& cx, const std::vector<NodalLine>& nodal, const SvgOptions& opts) {
  const double s = opts.pixels_per_unit;
  const double size = kTwoPi * s;
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  auto px = [&](const Vec2& p) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(2) << p.x() * s << ',' << size - p.y() * s;
    return o.str();
  };
  // Wrapped path; a new subpath starts wherever the curve leaves the fundamental square.
  auto path = [&](const Polyline& pts) {
    std::string d;
    Vec2 prev_cell(std::nan(""), std::nan(""));
    for (const auto& p : pts) {
      const Vec2 cell(std::floor(p.x() / kTwoPi), std::floor(p.y() / kTwoPi));
      const Vec2 q = p - kTwoPi * cell;
      d += (cell == prev_cell ? " L" : (d.empty() ? "M" : " M")) + px(q);
      prev_cell = cell;
    }
    return d;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<g class=\"neumann-lines\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n";
  for (const auto& l : cx.lines) out << "<path d=\"" << path(resample_uniform(l.samples(), 0.01)) << "\"/>\n";
  out << "</g>\n";
  if (opts.nodal) {
    out << "<g class=\"nodal-lines\" fill=\"none\" stroke=\"gray\" stroke-width=\"1.2\" stroke-dasharray=\"6,4\">\n";
    for (const auto& n : nodal) out << "<path d=\"" << path(n.points) << "\"/>\n";
    out << "</g>\n";
  }
  out << "<g class=\"critical-points\" stroke=\"black\" stroke-width=\"1\">\n";
  const double r = 5.0;
  for (const auto& c : cx.criticals) {
    std::vector<Vec2> copies{c.position};
    const double tol = 1e-6;
    if (c.position.x() < tol) copies.push_back(c.position + Vec2(kTwoPi, 0.0));
    if (c.position.y() < tol) copies.push_back(c.position + Vec2(0.0, kTwoPi));
    if (c.position.x() < tol && c.position.y() < tol) copies.push_back(c.position + Vec2(kTwoPi, kTwoPi));
    for (const auto& p : copies) {
      const double x = p.x() * s;
      const double y = size - p.y() * s;
      if (c.kind == CriticalKind::Saddle) {
        out << "<circle class=\"saddle\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"white\"/>\n";
      } else {
        const double dir = c.kind == CriticalKind::Maximum ? -1.0 : 1.0;
        out << "<polygon class=\"" << (c.kind == CriticalKind::Maximum ? "maximum" : "minimum") << "\" points=\""
            << x << ',' << y + dir * r << ' ' << x - r << ',' << y - dir * r * 0.7 << ' ' << x + r << ','
            << y - dir * r * 0.7 << "\" fill=\"" << (c.kind == CriticalKind::Maximum ? "black" : "white")
            << "\"/>\n";
      }
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace neumann
