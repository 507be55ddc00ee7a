#pragma once

#include "fmc/inequalities.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace fmc {

/// Body description document:
///   {"type": "polygon", "vertices": [[x, y], ...]}
///   {"type": "hull3d", "vertices": [[x, y, z], ...], "faces": [[i, j, k], ...]}
///   {"type": "ball", "dim": 2 | 3, "center": [...], "radius": r}
/// "faces" may be omitted for hull3d, in which case the hull of the vertices is used.
/// Throws ParseError for malformed documents and the geometry errors for invalid bodies.
ConvexBody parse_body(std::string_view text);
ConvexBody load_body(const std::string& path);
nlohmann::ordered_json body_to_json(const ConvexBody& body);

/// ball2d, ball3d, square, cube, icosa, thinrect. Throws ParamError otherwise.
ConvexBody named_fixture(std::string_view name);
std::vector<std::string> fixture_names();

nlohmann::ordered_json report_to_json(const InequalityReport& report);

} // namespace fmc
