#include "neumann/complex.hpp"
#include "neumann/cracked.hpp"
#include "neumann/error.hpp"
#include "neumann/invariants.hpp"
#include "neumann/io.hpp"
#include "neumann/nodal.hpp"
#include "neumann/spectrum.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using neumann::Json;

struct RunConfig {
  std::string command;
  std::string field;
  int seed_grid = 32;
  double mesh_h = 0.05;
  double grading = 1.3;
  std::optional<double> truncate;
  int num_eigs = 10;
  double cluster_tol = 1e-3;
  std::string out;
  bool svg = false;
  int domain = 0;
  std::optional<double> lambda;
  std::optional<double> square;
  std::vector<double> center;
  double scale = 0.3;
  std::optional<double> amplitude;
  bool reversed = false;
  std::uint64_t seed = 20201;
};

Json to_json(const RunConfig& c) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j;
  j["command"] = c.command;
  j["field"] = c.field;
  j["seed_grid"] = c.seed_grid;
  j["mesh_h"] = c.mesh_h;
  j["grading"] = c.grading;
  j["truncate"] = opt(c.truncate);
  j["num_eigs"] = c.num_eigs;
  j["cluster_tol"] = c.cluster_tol;
  j["svg"] = c.svg;
  j["domain"] = c.domain;
  j["lambda"] = opt(c.lambda);
  j["square"] = opt(c.square);
  j["center"] = c.center;
  j["scale"] = c.scale;
  j["amplitude"] = opt(c.amplitude);
  j["reversed"] = c.reversed;
  j["seed"] = c.seed;
  return j;
}

neumann::ComplexOptions complex_options(const RunConfig& c) {
  neumann::ComplexOptions o;
  o.critical.seed_grid = c.seed_grid;
  o.seed = c.seed;
  return o;
}

neumann::SpectrumOptions spectrum_options(const RunConfig& c) {
  neumann::SpectrumOptions o;
  o.mesh.h = c.mesh_h;
  o.mesh.grading = c.grading;
  o.mesh.truncate = c.truncate;
  o.num_eigs = c.num_eigs;
  o.cluster_tol = c.cluster_tol;
  return o;
}

neumann::MorseField require_field(const RunConfig& c) {
  if (c.field.empty()) throw neumann::Error(neumann::ErrorCode::InvalidArgument, "--field is required");
  return neumann::load_field(c.field);
}

// Writes `text` to out/name when an output directory is set, else to stdout.
void emit(const RunConfig& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  neumann::write_text((std::filesystem::path(c.out) / name).string(), text);
}

Json report(const RunConfig& c, Json body) {
  Json j;
  j["config"] = to_json(c);
  for (auto& [k, v] : body.items()) j[k] = std::move(v);
  return j;
}

void write_svg(const RunConfig& c, const neumann::NeumannComplex& cx, const std::string& name) {
  if (!c.svg) return;
  if (c.out.empty()) throw neumann::Error(neumann::ErrorCode::InvalidArgument, "--svg needs --out");
  emit(c, name, neumann::complex_svg(cx, neumann::nodal_set(cx.field)));
}

int run_crit(const RunConfig& c) {
  const auto field = require_field(c);
  neumann::CriticalOptions o;
  o.seed_grid = c.seed_grid;
  const auto cps = neumann::find_critical_points(field, o);
  emit(c, "criticals.json", neumann::dump(report(c, {{"criticals", neumann::criticals_to_json(cps)}})));
  return 0;
}

int run_complex(const RunConfig& c) {
  const auto cx = neumann::build_complex(require_field(c), complex_options(c));
  emit(c, "complex.json", neumann::dump(report(c, neumann::complex_to_json(cx))));
  write_svg(c, cx, "complex.svg");
  return 0;
}

neumann::TriMesh square_mesh(double side, const neumann::MeshOptions& opts) {
  if (!(side > 0.0)) throw neumann::Error(neumann::ErrorCode::InvalidArgument, "--square must be positive");
  const neumann::Polyline sq{{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}};
  return neumann::mesh_polygon(sq, opts);
}

neumann::SpectrumReport spectrum_for(const RunConfig& c, bool with_residual) {
  const auto opts = spectrum_options(c);
  if (c.square) {
    if (!c.lambda) throw neumann::Error(neumann::ErrorCode::InvalidArgument, "--square needs --lambda");
    const auto mesh = square_mesh(*c.square, opts.mesh);
    if (with_residual && !c.field.empty()) return neumann::spectrum_report(require_field(c), mesh, *c.lambda, opts);
    return neumann::spectrum_report(mesh, *c.lambda, opts);
  }
  const auto cx = neumann::build_complex(require_field(c), complex_options(c));
  if (c.domain < 0 || c.domain >= static_cast<int>(cx.domains.size())) {
    throw neumann::Error(neumann::ErrorCode::InvalidArgument,
                         "--domain must lie in [0, " + std::to_string(cx.domains.size()) + ")");
  }
  const auto ev = cx.field.eigenvalue();
  const double lambda = c.lambda.value_or(ev.value_or(-1.0));
  if (lambda < 0.0) throw neumann::Error(neumann::ErrorCode::NotAnEigenfunctionField, "no eigenvalue; pass --lambda");
  const auto mesh = neumann::mesh_domain(cx, c.domain, opts.mesh);
  if (with_residual && ev && *ev == lambda) return neumann::spectrum_report(cx.field, mesh, lambda, opts);
  return neumann::spectrum_report(mesh, lambda, opts);
}

int run_spectrum(const RunConfig& c) {
  const auto r = spectrum_for(c, true);
  emit(c, "spectrum.json", neumann::dump(report(c, neumann::spectrum_report_to_json(r))));
  return 0;
}

int run_position(const RunConfig& c) {
  const auto r = spectrum_for(c, false);
  if (!c.out.empty()) emit(c, "position.json", neumann::dump(report(c, neumann::spectrum_report_to_json(r))));
  std::cout << r.position << '\n';
  return 0;
}

int run_crack(const RunConfig& c) {
  if (c.center.size() != 2) throw neumann::Error(neumann::ErrorCode::InvalidArgument, "--center takes two values");
  const auto base = require_field(c);
  neumann::CrackOptions o;
  o.amplitude = c.amplitude;
  o.reversed = c.reversed;
  const auto tilde = neumann::build_crack_perturbation(base, {c.center[0], c.center[1]}, c.scale, o);
  const auto r = neumann::verify_cracked(tilde, complex_options(c));
  Json body = neumann::crack_report_to_json(r);
  body["field"] = neumann::field_to_json(tilde);
  body["complex"] = neumann::complex_to_json(r.complex);
  emit(c, "crack.json", neumann::dump(report(c, std::move(body))));
  write_svg(c, r.complex, "crack.svg");
  return 0;
}

int run_verify(const RunConfig& c) {
  const auto r = neumann::verify_invariants(require_field(c), complex_options(c));
  for (const auto& chk : r.checks) {
    std::cerr << (chk.passed ? "PASS " : "FAIL ") << chk.name;
    if (!chk.detail.empty()) std::cerr << " (" << chk.detail << ")";
    std::cerr << '\n';
  }
  emit(c, "verify.json", neumann::dump(report(c, neumann::invariant_report_to_json(r))));
  return r.ok() ? 0 : 4;
}

int exit_code(neumann::ErrorCode code) {
  switch (neumann::error_class(code)) {
    case neumann::ErrorClass::Config: return 2;
    case neumann::ErrorClass::Numerical: return 3;
    case neumann::ErrorClass::Assertion: return 4;
  }
  return 3;
}

// Fills every option not given on the command line from the config file.
void merge_config(const std::string& path, const std::map<std::string, std::pair<CLI::Option*, std::function<void(const Json&)>>>& keys) {
  std::ifstream in(path);
  if (!in) throw neumann::Error(neumann::ErrorCode::ParseError, "cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw neumann::Error(neumann::ErrorCode::ParseError, path + ": " + e.what());
  }
  if (!j.is_object()) throw neumann::Error(neumann::ErrorCode::ParseError, path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = keys.find(key);
    if (it == keys.end()) throw neumann::Error(neumann::ErrorCode::ParseError, path + ": unknown key \"" + key + "\"");
    if (it->second.first->count() > 0) continue;
    try {
      it->second.second(value);
    } catch (const Json::exception& e) {
      throw neumann::Error(neumann::ErrorCode::ParseError, path + ": key \"" + key + "\": " + e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neumann domains of Laplacian eigenfunctions on the flat torus"};
  app.require_subcommand(1);
  RunConfig c;
  std::string config_path;

  std::map<std::string, std::pair<CLI::Option*, std::function<void(const Json&)>>> keys;
  auto bind = [&](const std::string& key, auto& target, CLI::Option* opt) {
    keys[key] = {opt, [&target](const Json& v) { target = v.get<std::remove_reference_t<decltype(target)>>(); }};
  };
  auto bind_opt = [&](const std::string& key, std::optional<double>& target, CLI::Option* opt) {
    keys[key] = {opt, [&target](const Json& v) {
                   if (v.is_null()) {
                     target.reset();
                   } else {
                     target = v.get<double>();
                   }
                 }};
  };

  app.add_option("--config", config_path, "JSON file with option values; flags win");
  bind("field", c.field, app.add_option("--field", c.field, "Field definition (JSON)"));
  bind("seed_grid", c.seed_grid, app.add_option("--seed-grid", c.seed_grid, "Newton seed lattice size")->capture_default_str());
  bind("mesh_h", c.mesh_h, app.add_option("--mesh-h", c.mesh_h, "Target element size")->capture_default_str());
  bind("grading", c.grading, app.add_option("--grading", c.grading, "Mesh grading towards cusps")->capture_default_str());
  bind_opt("truncate", c.truncate, app.add_option("--truncate", c.truncate, "Cut cusps at level t * f(extremum)"));
  bind("num_eigs", c.num_eigs, app.add_option("--num-eigs", c.num_eigs, "Number of eigenvalues")->capture_default_str());
  bind("cluster_tol", c.cluster_tol, app.add_option("--cluster-tol", c.cluster_tol, "Relative cluster tolerance")->capture_default_str());
  bind("out", c.out, app.add_option("--out", c.out, "Output directory (default: JSON on stdout)"));
  bind("svg", c.svg, app.add_flag("--svg", c.svg, "Also write an SVG figure"));
  bind("domain", c.domain, app.add_option("--domain", c.domain, "Neumann domain index")->capture_default_str());
  bind_opt("lambda", c.lambda, app.add_option("--lambda", c.lambda, "Eigenvalue to place (default: the field's)"));
  bind_opt("square", c.square, app.add_option("--square", c.square, "Use the square (0,L)^2 instead of a Neumann domain"));
  bind("center", c.center, app.add_option("--center", c.center, "Crack patch centre x y")->expected(2));
  bind("scale", c.scale, app.add_option("--scale", c.scale, "Crack patch half-width")->capture_default_str());
  bind_opt("amplitude", c.amplitude, app.add_option("--amplitude", c.amplitude, "Crack bump amplitude K"));
  bind("reversed", c.reversed, app.add_flag("--reversed", c.reversed, "Create a minimum instead of a maximum"));
  bind("seed", c.seed, app.add_option("--seed", c.seed, "Seed for face sampling")->capture_default_str());

  const std::map<std::string, std::function<int(const RunConfig&)>> commands{
      {"crit", run_crit},       {"complex", run_complex}, {"spectrum", run_spectrum},
      {"position", run_position}, {"crack", run_crack},   {"verify", run_verify}};
  const std::map<std::string, std::string> help{
      {"crit", "Critical points"},
      {"complex", "Neumann complex (JSON, optional SVG)"},
      {"spectrum", "Neumann spectrum of one domain"},
      {"position", "Spectral position of lambda"},
      {"crack", "Add a crack perturbation and verify the cracked domain"},
      {"verify", "Invariant suite"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) merge_config(config_path, keys);
    c.command = app.get_subcommands().front()->get_name();
    return commands.at(c.command)(c);
  } catch (const neumann::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
