#include "fmc/io.hpp"

#include <fstream>
#include <sstream>

namespace fmc {

namespace {

using nlohmann::ordered_json;

double number(const nlohmann::json& v, const std::string& where)
{
    if (!v.is_number()) {
        throw Error(ErrorCode::ParseError, where + " must be a number");
    }
    return v.get<double>();
}

const nlohmann::json& field(const nlohmann::json& doc, const char* key)
{
    if (!doc.contains(key)) {
        throw Error(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
    }
    return doc.at(key);
}

Vec3 point(const nlohmann::json& v, std::size_t dim, const std::string& where)
{
    if (!v.is_array() || v.size() != dim) {
        throw Error(ErrorCode::ParseError, where + " must be an array of " + std::to_string(dim) + " numbers");
    }
    Vec3 p = Vec3::Zero();
    for (std::size_t k = 0; k < dim; ++k) {
        p[static_cast<int>(k)] = number(v[k], where);
    }
    return p;
}

ordered_json point_json(const Vec3& p, int dim)
{
    ordered_json out = ordered_json::array();
    for (int k = 0; k < dim; ++k) {
        out.push_back(p[k]);
    }
    return out;
}

} // namespace

ConvexBody parse_body(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorCode::ParseError, "body document must be an object");
    }
    const auto& type = field(doc, "type");
    if (!type.is_string()) {
        throw Error(ErrorCode::ParseError, "\"type\" must be a string");
    }
    const std::string kind = type.get<std::string>();
    if (kind == "polygon") {
        const auto& verts = field(doc, "vertices");
        if (!verts.is_array()) {
            throw Error(ErrorCode::ParseError, "\"vertices\" must be an array");
        }
        PolygonDesc desc;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            const Vec3 p = point(verts[i], 2, "vertex " + std::to_string(i));
            desc.vertices.emplace_back(p.x(), p.y());
        }
        return make_body(desc);
    }
    if (kind == "hull3d") {
        const auto& verts = field(doc, "vertices");
        if (!verts.is_array()) {
            throw Error(ErrorCode::ParseError, "\"vertices\" must be an array");
        }
        std::vector<Vec3> pts;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            pts.push_back(point(verts[i], 3, "vertex " + std::to_string(i)));
        }
        if (!doc.contains("faces")) {
            return hull_from_points(pts);
        }
        const auto& faces = doc.at("faces");
        if (!faces.is_array()) {
            throw Error(ErrorCode::ParseError, "\"faces\" must be an array");
        }
        HullDesc desc;
        desc.vertices = std::move(pts);
        for (std::size_t f = 0; f < faces.size(); ++f) {
            const auto& face = faces[f];
            if (!face.is_array() || face.size() != 3) {
                throw Error(ErrorCode::ParseError, "face " + std::to_string(f) + " must list 3 vertex indices");
            }
            std::array<int, 3> tri {};
            for (int k = 0; k < 3; ++k) {
                if (!face[k].is_number_integer()) {
                    throw Error(ErrorCode::ParseError, "face " + std::to_string(f) + " has a non-integer index");
                }
                tri[k] = face[k].get<int>();
            }
            desc.faces.push_back(tri);
        }
        return make_body(desc);
    }
    if (kind == "ball") {
        BallDesc desc;
        const auto& dim = field(doc, "dim");
        if (!dim.is_number_integer()) {
            throw Error(ErrorCode::ParseError, "\"dim\" must be 2 or 3");
        }
        desc.dim = dim.get<int>();
        if (desc.dim != 2 && desc.dim != 3) {
            throw Error(ErrorCode::ParseError, "\"dim\" must be 2 or 3");
        }
        desc.radius = number(field(doc, "radius"), "\"radius\"");
        if (doc.contains("center")) {
            desc.center = point(doc.at("center"), static_cast<std::size_t>(desc.dim), "\"center\"");
        }
        return make_body(desc);
    }
    throw Error(ErrorCode::ParseError, "unknown body type \"" + kind + "\" (expected polygon, hull3d or ball)");
}

ConvexBody load_body(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open body file " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_body(text.str());
}

ordered_json body_to_json(const ConvexBody& body)
{
    ordered_json out;
    if (const auto* ball = std::get_if<Ball>(&body.shape())) {
        out["type"] = "ball";
        out["dim"] = ball->dim;
        out["center"] = point_json(ball->center, ball->dim);
        out["radius"] = ball->radius;
        return out;
    }
    if (const auto* poly = std::get_if<Polygon2D>(&body.shape())) {
        out["type"] = "polygon";
        out["vertices"] = ordered_json::array();
        for (const auto& v : poly->vertices) {
            out["vertices"].push_back(point_json(v, 2));
        }
        return out;
    }
    const auto& hull = std::get<Hull3D>(body.shape());
    out["type"] = "hull3d";
    out["vertices"] = ordered_json::array();
    for (const auto& v : hull.vertices) {
        out["vertices"].push_back(point_json(v, 3));
    }
    out["faces"] = ordered_json::array();
    for (const auto& f : hull.faces) {
        out["faces"].push_back({f[0], f[1], f[2]});
    }
    return out;
}

std::vector<std::string> fixture_names()
{
    return {"ball2d", "ball3d", "square", "cube", "icosa", "thinrect"};
}

ConvexBody named_fixture(std::string_view name)
{
    if (name == "ball2d") {
        return disk(1.0);
    }
    if (name == "ball3d") {
        return sphere_ball(1.0);
    }
    if (name == "square") {
        return rectangle(1.0, 1.0);
    }
    if (name == "cube") {
        return box(1.0, 1.0, 1.0);
    }
    if (name == "icosa") {
        return icosahedron(1.0);
    }
    if (name == "thinrect") {
        return rectangle(1.0, 0.05);
    }
    throw Error(ErrorCode::ParamError, "unknown fixture \"" + std::string(name) + "\"");
}

ordered_json report_to_json(const InequalityReport& r)
{
    ordered_json out;
    out["name"] = r.name;
    out["body"] = r.body;
    out["kind"] = r.identity ? "identity" : "inequality";
    out["pass"] = r.pass;
    out["lhs"] = r.lhs;
    out["rhs"] = r.rhs;
    out["margin"] = r.margin;
    out["tolerance"] = r.tolerance;
    out["constant"] = r.constant;
    out["provenance"] = to_string(r.provenance);
    out["params"] = {{"n", r.params.n}, {"alpha", r.params.alpha}, {"s", r.params.s}, {"p", r.params.p}};
    out["resolution"] = r.resolution;
    out["estimated_error"] = r.estimated_error;
    out["seed"] = r.seed;
    ordered_json extras = ordered_json::object();
    for (const auto& [k, v] : r.extras) {
        extras[k] = v;
    }
    out["extras"] = extras;
    if (!r.note.empty()) {
        out["note"] = r.note;
    }
    return out;
}

} // namespace fmc
