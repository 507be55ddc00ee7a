#include "fmc/geometry.hpp"

#include "hull.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <numeric>

namespace fmc {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorCode::NotInward: return "NotInward";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::NotPolytope: return "NotPolytope";
    case ErrorCode::NonInteriorPoint: return "NonInteriorPoint";
    case ErrorCode::ParamError: return "ParamError";
    case ErrorCode::InvalidSequence: return "InvalidSequence";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

void Params::validate() const
{
    if (n != 1 && n != 2) {
        throw Error(ErrorCode::ParamError, "n must be 1 or 2");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::ParamError, "alpha must lie in (0,1)");
    }
    if (!(s > 0.0 && s < 1.0)) {
        throw Error(ErrorCode::ParamError, "s must lie in (0,1)");
    }
    if (!(p >= 1.0)) {
        throw Error(ErrorCode::ParamError, "p must be >= 1");
    }
}

double Params::critical_exponent() const
{
    if (!(n > s * p)) {
        throw Error(ErrorCode::ParamError, "critical exponent needs n > s p");
    }
    return n * p / (n - s * p);
}

namespace {

double cross_z(const Vec3& a, const Vec3& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

Polygon2D build_polygon(const PolygonDesc& desc)
{
    std::vector<Vec3> pts;
    for (const auto& v : desc.vertices) {
        if (!v.allFinite()) {
            throw Error(ErrorCode::Degenerate, "non-finite polygon coordinate");
        }
        pts.emplace_back(v.x(), v.y(), 0.0);
    }
    if (pts.size() < 3) {
        throw Error(ErrorCode::Degenerate, "polygon needs at least 3 vertices");
    }
    double scale = 0.0;
    for (const auto& p : pts) {
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    }
    double twice_area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        twice_area += cross_z(pts[i], pts[(i + 1) % pts.size()]);
    }
    if (std::abs(twice_area) <= 1e-14 * scale * scale) {
        throw Error(ErrorCode::Degenerate, "polygon has zero area");
    }
    if (twice_area < 0) {
        std::reverse(pts.begin(), pts.end());
    }

    // Drop repeated vertices and merge straight continuations.
    const double tol = 1e-12 * scale * scale;
    bool changed = true;
    while (changed && pts.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Vec3& prev = pts[(i + pts.size() - 1) % pts.size()];
            const Vec3& next = pts[(i + 1) % pts.size()];
            const Vec3 a = pts[i] - prev;
            const Vec3 b = next - pts[i];
            const bool repeated = a.norm() <= 1e-14 * scale;
            const bool straight = std::abs(cross_z(a, b)) <= tol && a.dot(b) > 0;
            if (repeated || straight) {
                pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    if (pts.size() < 3) {
        throw Error(ErrorCode::Degenerate, "fewer than 3 vertices after merging collinear points");
    }

    double turning = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3& prev = pts[(i + pts.size() - 1) % pts.size()];
        const Vec3& next = pts[(i + 1) % pts.size()];
        const Vec3 a = pts[i] - prev;
        const Vec3 b = next - pts[i];
        const double c = cross_z(a, b);
        if (c <= 0) {
            throw Error(ErrorCode::NonConvex,
                "cross product at vertex " + std::to_string(i) + " is not positive");
        }
        turning += std::atan2(c, a.dot(b));
    }
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
        throw Error(ErrorCode::NonConvex, "polygon winds more than once");
    }

    Polygon2D poly;
    poly.vertices = std::move(pts);
    const std::size_t m = poly.vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec3 e = poly.vertices[(i + 1) % m] - poly.vertices[i];
        const Vec3 nrm = Vec3(e.y(), -e.x(), 0.0).normalized();
        poly.edges.push_back({nrm, nrm.dot(poly.vertices[i])});
    }
    return poly;
}

Hull3D build_hull(const HullDesc& desc)
{
    Hull3D hull;
    hull.vertices = desc.vertices;
    hull.faces = desc.faces;
    const int nv = static_cast<int>(hull.vertices.size());
    const int nf = static_cast<int>(hull.faces.size());
    if (nv < 4 || nf < 4) {
        throw Error(ErrorCode::Degenerate, "hull needs at least 4 vertices and 4 faces");
    }
    double scale = 0.0;
    for (const auto& v : hull.vertices) {
        if (!v.allFinite()) {
            throw Error(ErrorCode::Degenerate, "non-finite hull coordinate");
        }
        scale = std::max(scale, v.cwiseAbs().maxCoeff());
    }
    for (const auto& f : hull.faces) {
        for (int v : f) {
            if (v < 0 || v >= nv) {
                throw Error(ErrorCode::Degenerate, "face index out of range");
            }
        }
    }

    // Closed orientable surface: every directed edge once, its reverse once.
    std::map<std::pair<int, int>, int> directed;
    for (int f = 0; f < nf; ++f) {
        for (int e = 0; e < 3; ++e) {
            const auto key = std::pair{hull.faces[f][e], hull.faces[f][(e + 1) % 3]};
            if (!directed.emplace(key, f).second) {
                throw Error(ErrorCode::Degenerate, "edge used twice with the same orientation");
            }
        }
    }
    for (const auto& [key, f] : directed) {
        if (!directed.contains({key.second, key.first})) {
            throw Error(ErrorCode::Degenerate, "surface is not closed");
        }
    }
    std::vector<char> used(nv, 0);
    for (const auto& f : hull.faces) {
        for (int v : f) {
            used[v] = 1;
        }
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
        throw Error(ErrorCode::NonConvex, "a vertex is not used by any face");
    }
    const int edges = static_cast<int>(directed.size()) / 2;
    if (nv - edges + nf != 2) {
        throw Error(ErrorCode::Degenerate, "Euler relation V - E + F = 2 fails");
    }

    std::vector<Plane> planes;
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : hull.vertices) {
        centroid += v;
    }
    centroid /= nv;
    int inward = 0;
    for (const auto& f : hull.faces) {
        const Vec3 nrm = (hull.vertices[f[1]] - hull.vertices[f[0]])
                             .cross(hull.vertices[f[2]] - hull.vertices[f[0]]);
        if (nrm.norm() <= 1e-14 * scale * scale) {
            throw Error(ErrorCode::Degenerate, "zero-area face");
        }
        const Vec3 unit = nrm.normalized();
        planes.push_back({unit, unit.dot(hull.vertices[f[0]])});
        inward += planes.back().signed_distance(centroid) > 0 ? 1 : 0;
    }
    if (inward == nf) {
        for (auto& f : hull.faces) {
            std::swap(f[1], f[2]);
        }
        for (auto& pl : planes) {
            pl.normal = -pl.normal;
            pl.offset = -pl.offset;
        }
    }
    const double tol = 1e-10 * std::max(scale, 1e-300);
    for (const auto& pl : planes) {
        for (const auto& v : hull.vertices) {
            if (pl.signed_distance(v) > tol) {
                throw Error(ErrorCode::NonConvex, "a face normal is not outward / surface not convex");
            }
        }
    }

    // Group coplanar neighbours into facets.
    std::vector<int> parent(nf);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) {
            a = parent[a] = parent[parent[a]];
        }
        return a;
    };
    for (int f = 0; f < nf; ++f) {
        for (int e = 0; e < 3; ++e) {
            const int g = directed.at({hull.faces[f][(e + 1) % 3], hull.faces[f][e]});
            if ((planes[f].normal - planes[g].normal).norm() < 1e-9) {
                parent[find(f)] = find(g);
            }
        }
    }
    std::map<int, int> facet_index;
    hull.face_facet.resize(nf);
    for (int f = 0; f < nf; ++f) {
        auto [it, inserted] = facet_index.try_emplace(find(f), static_cast<int>(hull.facets.size()));
        if (inserted) {
            hull.facets.push_back(planes[f]);
        }
        hull.face_facet[f] = it->second;
    }
    for (const auto& [key, f] : directed) {
        if (key.first < key.second) {
            const int g = directed.at({key.second, key.first});
            if (hull.face_facet[f] != hull.face_facet[g]) {
                hull.ridges.push_back({hull.vertices[key.first], hull.vertices[key.second]});
            }
        }
    }

    // Extreme vertices lie on facets whose normals span R^3.
    std::vector<std::vector<int>> incident(nv);
    for (int f = 0; f < nf; ++f) {
        for (int v : hull.faces[f]) {
            incident[v].push_back(hull.face_facet[f]);
        }
    }
    for (int v = 0; v < nv; ++v) {
        Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
        for (int facet : incident[v]) {
            gram += hull.facets[facet].normal * hull.facets[facet].normal.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram);
        if (eig.eigenvalues()(0) < 1e-10) {
            throw Error(ErrorCode::NonConvex, "vertex " + std::to_string(v) + " is not extreme");
        }
    }
    return hull;
}

} // namespace

ConvexBody make_body(const BodyDescription& description)
{
    return std::visit(
        [](const auto& desc) -> ConvexBody {
            using T = std::decay_t<decltype(desc)>;
            if constexpr (std::is_same_v<T, PolygonDesc>) {
                return ConvexBody(build_polygon(desc));
            } else if constexpr (std::is_same_v<T, HullDesc>) {
                return ConvexBody(build_hull(desc));
            } else {
                if (desc.dim != 2 && desc.dim != 3) {
                    throw Error(ErrorCode::Degenerate, "ball dimension must be 2 or 3");
                }
                if (!(desc.radius > 0.0) || !std::isfinite(desc.radius)) {
                    throw Error(ErrorCode::Degenerate, "ball radius must be positive");
                }
                Vec3 center = desc.center;
                if (desc.dim == 2) {
                    center.z() = 0.0;
                }
                return ConvexBody(Ball{desc.dim, center, desc.radius});
            }
        },
        description);
}

int ConvexBody::surface_dim() const
{
    if (const auto* ball = std::get_if<Ball>(&shape_)) {
        return ball->dim - 1;
    }
    return std::holds_alternative<Polygon2D>(shape_) ? 1 : 2;
}

std::span<const Plane> ConvexBody::planes() const
{
    if (const auto* poly = std::get_if<Polygon2D>(&shape_)) {
        return poly->edges;
    }
    if (const auto* hull = std::get_if<Hull3D>(&shape_)) {
        return hull->facets;
    }
    return {};
}

std::span<const Vec3> ConvexBody::vertices() const
{
    if (const auto* poly = std::get_if<Polygon2D>(&shape_)) {
        return poly->vertices;
    }
    if (const auto* hull = std::get_if<Hull3D>(&shape_)) {
        return hull->vertices;
    }
    return {};
}

Vec3 ConvexBody::centroid() const
{
    if (const auto* ball = std::get_if<Ball>(&shape_)) {
        return ball->center;
    }
    Vec3 c = Vec3::Zero();
    for (const auto& v : vertices()) {
        c += v;
    }
    return c / static_cast<double>(vertices().size());
}

ConvexBody polygon_from_points(std::span<const Eigen::Vector2d> points)
{
    return make_body(PolygonDesc{detail::convex_hull_2d(points)});
}

ConvexBody hull_from_points(std::span<const Vec3> points)
{
    auto mesh = detail::convex_hull_3d(points);
    return make_body(HullDesc{std::move(mesh.vertices), std::move(mesh.faces)});
}

ConvexBody regular_polygon(int k, double circumradius, double phase)
{
    PolygonDesc desc;
    for (int i = 0; i < k; ++i) {
        const double t = phase + 2.0 * std::numbers::pi * i / k;
        desc.vertices.emplace_back(circumradius * std::cos(t), circumradius * std::sin(t));
    }
    return make_body(desc);
}

ConvexBody rectangle(double width, double height)
{
    return make_body(PolygonDesc{{{0, 0}, {width, 0}, {width, height}, {0, height}}});
}

ConvexBody box(double a, double b, double c)
{
    HullDesc desc;
    for (int i = 0; i < 8; ++i) {
        desc.vertices.emplace_back((i & 1) ? a : 0.0, (i & 2) ? b : 0.0, (i & 4) ? c : 0.0);
    }
    // Two triangles per face, outward.
    desc.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
        {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
    return make_body(desc);
}

ConvexBody icosahedron(double circumradius)
{
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Vec3> pts;
    for (double a : {-1.0, 1.0}) {
        for (double b : {-phi, phi}) {
            pts.emplace_back(0, a, b);
            pts.emplace_back(a, b, 0);
            pts.emplace_back(b, 0, a);
        }
    }
    for (auto& p : pts) {
        p *= circumradius / p.norm();
    }
    return hull_from_points(pts);
}

ConvexBody disk(double radius)
{
    return make_body(BallDesc{2, Vec3::Zero(), radius});
}

ConvexBody sphere_ball(double radius)
{
    return make_body(BallDesc{3, Vec3::Zero(), radius});
}

ConvexBody scaled(const ConvexBody& body, double lambda)
{
    return rotated(body, lambda * Eigen::Matrix3d::Identity());
}

ConvexBody rotated(const ConvexBody& body, const Eigen::Matrix3d& rotation)
{
    return std::visit(
        [&](const auto& shape) -> ConvexBody {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Polygon2D>) {
                PolygonDesc desc;
                for (const auto& v : shape.vertices) {
                    const Vec3 w = rotation * v;
                    desc.vertices.emplace_back(w.x(), w.y());
                }
                return make_body(desc);
            } else if constexpr (std::is_same_v<T, Hull3D>) {
                HullDesc desc{{}, shape.faces};
                for (const auto& v : shape.vertices) {
                    desc.vertices.push_back(rotation * v);
                }
                return make_body(desc);
            } else {
                const double lambda = std::cbrt(std::abs(rotation.determinant()));
                return make_body(BallDesc{shape.dim, rotation * shape.center, lambda * shape.radius});
            }
        },
        body.shape());
}

double perimeter(const ConvexBody& body)
{
    return std::visit(
        [](const auto& shape) -> double {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Polygon2D>) {
                double total = 0.0;
                for (std::size_t i = 0; i < shape.vertices.size(); ++i) {
                    total += (shape.vertices[(i + 1) % shape.vertices.size()] - shape.vertices[i]).norm();
                }
                return total;
            } else if constexpr (std::is_same_v<T, Hull3D>) {
                double total = 0.0;
                for (const auto& f : shape.faces) {
                    total += 0.5
                        * (shape.vertices[f[1]] - shape.vertices[f[0]])
                              .cross(shape.vertices[f[2]] - shape.vertices[f[0]])
                              .norm();
                }
                return total;
            } else {
                return shape.dim == 2 ? 2.0 * std::numbers::pi * shape.radius
                                      : 4.0 * std::numbers::pi * shape.radius * shape.radius;
            }
        },
        body.shape());
}

double area(const ConvexBody& body)
{
    return std::visit(
        [](const auto& shape) -> double {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Polygon2D>) {
                double twice = 0.0;
                for (std::size_t i = 0; i < shape.vertices.size(); ++i) {
                    twice += cross_z(shape.vertices[i], shape.vertices[(i + 1) % shape.vertices.size()]);
                }
                return 0.5 * twice;
            } else if constexpr (std::is_same_v<T, Hull3D>) {
                double six = 0.0;
                for (const auto& f : shape.faces) {
                    six += shape.vertices[f[0]].dot(shape.vertices[f[1]].cross(shape.vertices[f[2]]));
                }
                return six / 6.0;
            } else {
                const double r = shape.radius;
                return shape.dim == 2 ? std::numbers::pi * r * r : 4.0 / 3.0 * std::numbers::pi * r * r * r;
            }
        },
        body.shape());
}

double diameter(const ConvexBody& body)
{
    if (const auto* ball = std::get_if<Ball>(&body.shape())) {
        return 2.0 * ball->radius;
    }
    const auto verts = body.vertices();
    double best = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        for (std::size_t j = i + 1; j < verts.size(); ++j) {
            best = std::max(best, (verts[i] - verts[j]).squaredNorm());
        }
    }
    return std::sqrt(best);
}

bool contains(const ConvexBody& body, const Vec3& y)
{
    if (const auto* ball = std::get_if<Ball>(&body.shape())) {
        Vec3 d = y - ball->center;
        if (ball->dim == 2) {
            d.z() = 0.0;
        }
        return d.norm() < ball->radius;
    }
    for (const auto& pl : body.planes()) {
        if (pl.signed_distance(y) >= 0.0) {
            return false;
        }
    }
    return true;
}

} // namespace fmc
