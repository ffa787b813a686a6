#include "neumann/error.hpp"
#include "neumann/io.hpp"

#include "test_fields.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

using namespace neumann;

namespace {

int count(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<int>(std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

}  // namespace

TEST(Io, FieldRoundTrip) {
  MorseField f = fixtures::lambda17_generic();
  CrackPerturbation p;
  p.center = {1.25, 2.5};
  p.axis = Vec2(0.6, -0.8);
  p.scale = 0.3;
  p.slope = 0.42;
  p.amplitude = -1.75;
  f = f.with_perturbation(p);
  const MorseField g = field_from_json(Json::parse(dump(field_to_json(f))));
  ASSERT_EQ(g.modes().size(), f.modes().size());
  ASSERT_EQ(g.perturbations().size(), 1u);
  for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(1.3, 2.4), Vec2(5.0, 3.3)}) EXPECT_EQ(g.value(x), f.value(x));
  EXPECT_EQ(dump(field_to_json(g)), dump(field_to_json(f)));
}

TEST(Io, BundledFields) {
  EXPECT_EQ(load_field(fixtures::data_path("fields/separable.json")).eigenvalue(), 1.0);
  EXPECT_EQ(load_field(fixtures::data_path("fields/lambda17.json")).eigenvalue(), 17.0);
  const MorseField g = load_field(fixtures::data_path("fields/lambda17_generic.json"));
  EXPECT_EQ(g.eigenvalue(), 17.0);
  EXPECT_EQ(g.value({0.7, 0.4}), fixtures::lambda17_generic().value({0.7, 0.4}));
}

TEST(Io, ParseErrors) {
  auto code = [](const std::string& text) {
    try {
      field_from_json(Json::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::AssertionFailed;
  };
  EXPECT_EQ(code("{}"), ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"modes": []})"), ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"modes": [{"a": 1, "m": "x", "n": 0}]})"), ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"modes": [{"m": 1, "n": 0}]})"), ErrorCode::ParseError);
  EXPECT_THROW(load_field("/nonexistent/field.json"), Error);
  EXPECT_EQ(error_class(ErrorCode::ParseError), ErrorClass::Config);
}

TEST(Io, ComplexJsonDeterministic) {
  const MorseField f = fixtures::separable();
  const std::string a = dump(complex_to_json(build_complex(f)));
  const std::string b = dump(complex_to_json(build_complex(f)));
  EXPECT_EQ(a, b);
  const Json j = Json::parse(a);
  EXPECT_EQ(j["counts"]["vertices"], 4);
  EXPECT_EQ(j["counts"]["edges"], 8);
  EXPECT_EQ(j["counts"]["faces"], 4);
  EXPECT_EQ(j["faces"].size(), 4u);
  EXPECT_EQ(j["lines"].size(), 8u);
  for (const auto& face : j["faces"]) EXPECT_EQ(face["class"], "regular");
}

TEST(Io, SeparableSvgConventions) {
  const auto cx = build_complex(fixtures::separable());
  const std::string svg = complex_svg(cx, nodal_set(cx.field));
  const auto lines_begin = svg.find("class=\"neumann-lines\"");
  const auto nodal_begin = svg.find("class=\"nodal-lines\"");
  const auto points_begin = svg.find("class=\"critical-points\"");
  ASSERT_NE(lines_begin, std::string::npos);
  ASSERT_NE(nodal_begin, std::string::npos);
  EXPECT_EQ(count(svg.substr(lines_begin, nodal_begin - lines_begin), "<path "), 8);
  EXPECT_EQ(count(svg.substr(nodal_begin, points_begin - nodal_begin), "<path "), 2);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  // Saddles at (0, pi) and (pi, 0) also appear at their images on the far edge.
  EXPECT_EQ(count(svg, "<circle class=\"saddle\""), 4);
  EXPECT_EQ(count(svg, "class=\"maximum\""), 4);
  EXPECT_EQ(count(svg, "class=\"minimum\""), 1);
}

TEST(Io, OffAndMarkers) {
  MeshOptions o;
  o.h = 0.5;
  const TriMesh m = mesh_polygon({{0, 0}, {2, 0}, {2, 2}, {0, 2}}, o);
  std::ostringstream off;
  write_off(m, off);
  std::istringstream in(off.str());
  std::string header;
  std::size_t nv = 0, nt = 0, ne = 0;
  in >> header >> nv >> nt >> ne;
  EXPECT_EQ(header, "OFF");
  EXPECT_EQ(nv, m.vertices.size());
  EXPECT_EQ(nt, m.triangles.size());
  double x, y, z;
  for (std::size_t i = 0; i < nv; ++i) {
    in >> x >> y >> z;
    EXPECT_EQ(x, m.vertices[i].x());
  }
  int three, a, b, c;
  in >> three >> a >> b >> c;
  EXPECT_EQ(three, 3);
  EXPECT_EQ(a, m.triangles[0][0]);
  const Json j = mesh_markers_to_json(m);
  EXPECT_EQ(j["boundary_edges"].size(), m.boundary_edges.size());
  EXPECT_EQ(j["boundary_edges"][0]["marker"], "boundary");
  EXPECT_TRUE(j["slit_copies"].empty());
}

TEST(Io, SpectrumReportShape) {
  SpectrumReport r;
  r.mu = {0.0, 1.0};
  r.lambda = 17.0;
  r.position = 3;
  r.residual = 0.01;
  r.h = 0.05;
  const Json j = spectrum_report_to_json(r);
  EXPECT_EQ(j["lambda"], 17.0);
  EXPECT_EQ(j["position"], 3);
  EXPECT_EQ(j["mesh"]["h"], 0.05);
  EXPECT_TRUE(j["mesh"]["t"].is_null());
  EXPECT_EQ(dump(j).back(), '\n');
}
