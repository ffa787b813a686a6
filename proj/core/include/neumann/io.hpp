#pragma once

#include "neumann/complex.hpp"
#include "neumann/cracked.hpp"
#include "neumann/field.hpp"
#include "neumann/invariants.hpp"
#include "neumann/mesh.hpp"
#include "neumann/nodal.hpp"
#include "neumann/spectrum.hpp"
#include "neumann/truncate.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace neumann {

using Json = nlohmann::ordered_json;

/// {"modes":[{"a","m","n","theta"}],"perturbations":[...]}. Throws ParseError.
MorseField field_from_json(const Json& j);
Json field_to_json(const MorseField& field);
MorseField load_field(const std::string& path);

Json criticals_to_json(std::span<const CriticalPoint> criticals);

/// Critical points, lines (resampled at `spacing` unless it is 0) and faces.
Json complex_to_json(const NeumannComplex& complex, double spacing = 0.01);

Json spectrum_report_to_json(const SpectrumReport& report);
Json checks_to_json(std::span<const Check> checks);
Json crack_report_to_json(const CrackedReport& report);
Json invariant_report_to_json(const InvariantReport& report);
Json truncation_to_json(const TruncatedDomain& domain);

/// OFF text: header, vertex and triangle counts, vertices, triangles.
void write_off(const TriMesh& mesh, std::ostream& out);
/// Boundary edges with their markers, plus slit copy origins.
Json mesh_markers_to_json(const TriMesh& mesh);

struct SvgOptions {
  double pixels_per_unit = 80.0;
  bool nodal = true;
};

/// Figure of the complex on the fundamental domain: one solid path per Neumann
/// line, one dashed path per nodal curve, circles at saddles and triangles at
/// extrema (pointing up for maxima). Markers on the domain edge are repeated at
/// their periodic images.
std::string complex_svg(const NeumannComplex& complex, const std::vector<NodalLine>& nodal,
                        const SvgOptions& opts = {});

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);

/// JSON text with a fixed layout, so equal inputs give byte-identical output.
std::string dump(const Json& j);

}  // namespace neumann
