#include "fmc/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace fmc {

namespace {

constexpr double kPi = std::numbers::pi;

double cross_z(const Vec3& a, const Vec3& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

Vec3 on_sphere(const Vec3& center, double radius, const Vec3& y)
{
    return center + radius * (y - center).normalized();
}

double spherical_excess(const Vec3& a, const Vec3& b, const Vec3& c)
{
    const double num = std::abs(a.dot(b.cross(c)));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

// In-plane distance from p (on facet `facet`) to the relative boundary of the facet.
double facet_edge_distance(std::span<const Plane> planes, int facet, const Vec3& p)
{
    const Vec3& own = planes[facet].normal;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < planes.size(); ++g) {
        if (static_cast<int>(g) == facet) {
            continue;
        }
        const double c = own.dot(planes[g].normal);
        const double sine = std::sqrt(std::max(0.0, 1.0 - c * c));
        if (sine < 1e-12) {
            continue;
        }
        best = std::min(best, std::max(0.0, -planes[g].signed_distance(p)) / sine);
    }
    return best;
}

void push_node(SurfaceQuadrature& quad, const Cell& cell, int facet, double edge_distance)
{
    const CellSample s = sample(cell);
    quad.nodes.push_back({s.point, s.normal, s.weight, facet, cell, cell_diameter(cell), edge_distance});
}

void subdivide_sphere(SurfaceQuadrature& quad, const Cell& cell, int levels)
{
    if (levels == 0) {
        push_node(quad, cell, -1, std::numeric_limits<double>::infinity());
        return;
    }
    std::array<Cell, 4> children;
    const int count = split(cell, children);
    for (int i = 0; i < count; ++i) {
        subdivide_sphere(quad, children[i], levels - 1);
    }
}

} // namespace

CellSample sample(const Cell& cell)
{
    switch (cell.kind) {
    case CellKind::Segment:
        return {0.5 * (cell.v[0] + cell.v[1]), cell.aux, (cell.v[1] - cell.v[0]).norm()};
    case CellKind::Arc: {
        const Vec3 mid = on_sphere(cell.aux, cell.radius, 0.5 * (cell.v[0] + cell.v[1]));
        const double chord = (cell.v[1] - cell.v[0]).norm();
        const double angle = 2.0 * std::asin(std::min(1.0, 0.5 * chord / cell.radius));
        return {mid, (mid - cell.aux) / cell.radius, cell.radius * angle};
    }
    case CellKind::Triangle:
        return {(cell.v[0] + cell.v[1] + cell.v[2]) / 3.0, cell.aux,
            0.5 * (cell.v[1] - cell.v[0]).cross(cell.v[2] - cell.v[0]).norm()};
    case CellKind::SphericalTriangle: {
        const Vec3 mid = on_sphere(cell.aux, cell.radius, (cell.v[0] + cell.v[1] + cell.v[2]) / 3.0);
        const Vec3 a = (cell.v[0] - cell.aux) / cell.radius;
        const Vec3 b = (cell.v[1] - cell.aux) / cell.radius;
        const Vec3 c = (cell.v[2] - cell.aux) / cell.radius;
        return {mid, (mid - cell.aux) / cell.radius, cell.radius * cell.radius * spherical_excess(a, b, c)};
    }
    }
    return {};
}

int split(const Cell& cell, std::array<Cell, 4>& children)
{
    auto mid = [&](const Vec3& a, const Vec3& b) -> Vec3 {
        const Vec3 m = 0.5 * (a + b);
        return cell.kind == CellKind::Arc || cell.kind == CellKind::SphericalTriangle
            ? on_sphere(cell.aux, cell.radius, m)
            : m;
    };
    if (cell.corner_count() == 2) {
        const Vec3 m = mid(cell.v[0], cell.v[1]);
        children[0] = cell;
        children[0].v[1] = m;
        children[1] = cell;
        children[1].v[0] = m;
        return 2;
    }
    const Vec3 m01 = mid(cell.v[0], cell.v[1]);
    const Vec3 m12 = mid(cell.v[1], cell.v[2]);
    const Vec3 m20 = mid(cell.v[2], cell.v[0]);
    const std::array<std::array<Vec3, 3>, 4> corners {{
        {cell.v[0], m01, m20},
        {m01, cell.v[1], m12},
        {m20, m12, cell.v[2]},
        {m01, m12, m20},
    }};
    for (int i = 0; i < 4; ++i) {
        children[i] = cell;
        children[i].v = corners[i];
    }
    return 4;
}

double cell_diameter(const Cell& cell)
{
    double d = (cell.v[1] - cell.v[0]).norm();
    if (cell.corner_count() == 3) {
        d = std::max({d, (cell.v[2] - cell.v[1]).norm(), (cell.v[0] - cell.v[2]).norm()});
    }
    return d;
}

bool cell_contains(const Cell& cell, const Vec3& y)
{
    constexpr double eps = 1e-12;
    switch (cell.kind) {
    case CellKind::Segment: {
        const Vec3 e = cell.v[1] - cell.v[0];
        const double t = e.dot(y - cell.v[0]) / e.squaredNorm();
        return t >= -eps && t <= 1.0 + eps;
    }
    case CellKind::Arc: {
        const Vec3 a = cell.v[0] - cell.aux;
        const Vec3 b = cell.v[1] - cell.aux;
        const Vec3 d = y - cell.aux;
        const double scale = cell.radius * cell.radius * eps;
        return cross_z(a, d) >= -scale && cross_z(d, b) >= -scale;
    }
    case CellKind::Triangle: {
        const Vec3& nrm = cell.aux;
        for (int i = 0; i < 3; ++i) {
            const Vec3 e = cell.v[(i + 1) % 3] - cell.v[i];
            if (nrm.dot(e.cross(y - cell.v[i])) < -eps * e.squaredNorm()) {
                return false;
            }
        }
        return true;
    }
    case CellKind::SphericalTriangle: {
        const Vec3 a = cell.v[0] - cell.aux;
        const Vec3 b = cell.v[1] - cell.aux;
        const Vec3 c = cell.v[2] - cell.aux;
        const Vec3 d = y - cell.aux;
        const double sign = a.dot(b.cross(c)) >= 0 ? 1.0 : -1.0;
        const double scale = std::pow(cell.radius, 3) * eps;
        return sign * d.dot(a.cross(b)) >= -scale && sign * d.dot(b.cross(c)) >= -scale
            && sign * d.dot(c.cross(a)) >= -scale;
    }
    }
    return false;
}

SurfaceQuadrature surface_quadrature(const ConvexBody& body, int resolution)
{
    SurfaceQuadrature quad;
    quad.n = body.surface_dim();
    quad.polytope = body.is_polytope();
    quad.resolution = resolution;
    quad.body_diameter = diameter(body);

    if (const auto* poly = std::get_if<Polygon2D>(&body.shape())) {
        if (resolution < 1) {
            throw Error(ErrorCode::ResolutionTooLow, "polygon needs at least 1 sub-segment per edge");
        }
        const std::size_t m = poly->vertices.size();
        for (std::size_t e = 0; e < m; ++e) {
            const Vec3& a = poly->vertices[e];
            const Vec3& b = poly->vertices[(e + 1) % m];
            for (int k = 0; k < resolution; ++k) {
                Cell cell;
                cell.kind = CellKind::Segment;
                cell.v[0] = a + (b - a) * (static_cast<double>(k) / resolution);
                cell.v[1] = a + (b - a) * (static_cast<double>(k + 1) / resolution);
                cell.aux = poly->edges[e].normal;
                const Vec3 mid = 0.5 * (cell.v[0] + cell.v[1]);
                push_node(quad, cell, static_cast<int>(e), facet_edge_distance(poly->edges, static_cast<int>(e), mid));
            }
        }
    } else if (const auto* hull = std::get_if<Hull3D>(&body.shape())) {
        if (resolution < 1) {
            throw Error(ErrorCode::ResolutionTooLow, "hull needs subdivision frequency >= 1");
        }
        const int f = resolution;
        for (std::size_t t = 0; t < hull->faces.size(); ++t) {
            const auto& face = hull->faces[t];
            const int facet = hull->face_facet[t];
            const Vec3& p0 = hull->vertices[face[0]];
            const Vec3 u = (hull->vertices[face[1]] - p0) / f;
            const Vec3 w = (hull->vertices[face[2]] - p0) / f;
            auto grid = [&](int i, int j) -> Vec3 { return p0 + i * u + j * w; };
            for (int i = 0; i < f; ++i) {
                for (int j = 0; i + j < f; ++j) {
                    std::array<std::array<Vec3, 3>, 2> tris {{
                        {grid(i, j), grid(i + 1, j), grid(i, j + 1)},
                        {grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)},
                    }};
                    const int count = (i + j + 1 < f) ? 2 : 1;
                    for (int k = 0; k < count; ++k) {
                        Cell cell;
                        cell.kind = CellKind::Triangle;
                        cell.v = tris[k];
                        cell.aux = hull->facets[facet].normal;
                        const Vec3 mid = (cell.v[0] + cell.v[1] + cell.v[2]) / 3.0;
                        push_node(quad, cell, facet, facet_edge_distance(hull->facets, facet, mid));
                    }
                }
            }
        }
    } else {
        const auto& ball = std::get<Ball>(body.shape());
        if (ball.dim == 2) {
            if (resolution < 8) {
                throw Error(ErrorCode::ResolutionTooLow, "disk needs at least 8 arcs");
            }
            for (int k = 0; k < resolution; ++k) {
                const double t0 = 2.0 * kPi * k / resolution;
                const double t1 = 2.0 * kPi * (k + 1) / resolution;
                Cell cell;
                cell.kind = CellKind::Arc;
                cell.v[0] = ball.center + ball.radius * Vec3(std::cos(t0), std::sin(t0), 0.0);
                cell.v[1] = ball.center + ball.radius * Vec3(std::cos(t1), std::sin(t1), 0.0);
                cell.aux = ball.center;
                cell.radius = ball.radius;
                push_node(quad, cell, -1, std::numeric_limits<double>::infinity());
            }
        } else {
            if (resolution < 1) {
                throw Error(ErrorCode::ResolutionTooLow, "3-ball needs at least 1 subdivision level");
            }
            const auto ico = icosahedron(1.0);
            const auto& mesh = std::get<Hull3D>(ico.shape());
            for (const auto& face : mesh.faces) {
                Cell cell;
                cell.kind = CellKind::SphericalTriangle;
                for (int i = 0; i < 3; ++i) {
                    cell.v[i] = ball.center + ball.radius * mesh.vertices[face[i]];
                }
                cell.aux = ball.center;
                cell.radius = ball.radius;
                subdivide_sphere(quad, cell, resolution);
            }
        }
    }
    std::vector<double> weights;
    weights.reserve(quad.nodes.size());
    for (const auto& node : quad.nodes) {
        weights.push_back(node.weight);
    }
    quad.total_area = std::accumulate(weights.begin(), weights.end(), 0.0);
    return quad;
}

SurfacePoint surface_point(const SurfaceQuadrature& quad, int node)
{
    const auto& nd = quad.nodes.at(static_cast<std::size_t>(node));
    return {nd.point, nd.normal, nd.facet, nd.edge_distance, node};
}

SurfacePoint locate(const ConvexBody& body, const Vec3& y)
{
    if (const auto* ball = std::get_if<Ball>(&body.shape())) {
        Vec3 d = y - ball->center;
        if (ball->dim == 2) {
            d.z() = 0.0;
        }
        const Vec3 nrm = d.normalized();
        return {ball->center + ball->radius * nrm, nrm, -1, std::numeric_limits<double>::infinity(), -1};
    }
    const auto planes = body.planes();
    int best = 0;
    for (std::size_t g = 1; g < planes.size(); ++g) {
        if (planes[g].signed_distance(y) > planes[best].signed_distance(y)) {
            best = static_cast<int>(g);
        }
    }
    const Vec3 p = y - planes[best].signed_distance(y) * planes[best].normal;
    return {p, planes[best].normal, best, facet_edge_distance(planes, best, p), -1};
}

NodeSubset make_subset(const SurfaceQuadrature& quad, std::vector<char> mask)
{
    if (mask.size() != quad.size()) {
        throw Error(ErrorCode::ParamError, "subset mask size does not match the quadrature");
    }
    NodeSubset out;
    out.mask = std::move(mask);
    for (std::size_t i = 0; i < quad.size(); ++i) {
        if (out.mask[i]) {
            out.measure += quad.nodes[i].weight;
        }
    }
    return out;
}

NodeSubset complement(const SurfaceQuadrature& quad, const NodeSubset& subset)
{
    std::vector<char> mask(subset.mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = subset.mask[i] ? 0 : 1;
    }
    return make_subset(quad, std::move(mask));
}

NodeSubset full_subset(const SurfaceQuadrature& quad)
{
    return make_subset(quad, std::vector<char>(quad.size(), 1));
}

NodeSubset ball_subset(const SurfaceQuadrature& quad, const Vec3& x, double radius)
{
    std::vector<char> mask(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        mask[i] = (quad.nodes[i].point - x).norm() < radius ? 1 : 0;
    }
    return make_subset(quad, std::move(mask));
}

double chord_length(const ConvexBody& body, const SurfacePoint& x, const Vec3& omega)
{
    if (!(omega.dot(x.normal) < 0.0)) {
        throw Error(ErrorCode::NotInward, "direction does not point into the body");
    }
    if (const auto* ball = std::get_if<Ball>(&body.shape())) {
        const Vec3 d = x.point - ball->center;
        const double b = d.dot(omega);
        const double c = d.squaredNorm() - ball->radius * ball->radius;
        return std::max(0.0, -b + std::sqrt(std::max(0.0, b * b - c)));
    }
    double t = std::numeric_limits<double>::infinity();
    const auto planes = body.planes();
    for (std::size_t g = 0; g < planes.size(); ++g) {
        if (static_cast<int>(g) == x.facet) {
            continue;
        }
        const double rate = planes[g].normal.dot(omega);
        if (rate > 1e-12) {
            t = std::min(t, std::max(0.0, -planes[g].signed_distance(x.point)) / rate);
        }
    }
    return t;
}

double ball_patch_measure(const SurfaceQuadrature& quad, const Vec3& x, double radius)
{
    std::vector<double> terms;
    for (const auto& node : quad.nodes) {
        if ((node.point - x).norm() < radius) {
            terms.push_back(node.weight);
        }
    }
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

namespace {

double clipped_measure(const Cell& cell, const Vec3& x, double radius, int depth)
{
    const CellSample s = sample(cell);
    const double diam = cell_diameter(cell);
    const double dist = (s.point - x).norm();
    if (dist + diam < radius) {
        return s.weight;
    }
    if (dist - diam >= radius) {
        return 0.0;
    }
    if (depth >= 18 || diam < (cell.corner_count() == 3 ? 1e-3 : 1e-4) * radius) {
        return dist < radius ? s.weight : 0.0;
    }
    std::array<Cell, 4> kids;
    const int count = split(cell, kids);
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
        total += clipped_measure(kids[i], x, radius, depth + 1);
    }
    return total;
}

} // namespace

double clipped_patch_measure(const SurfaceQuadrature& quad, const Vec3& x, double radius)
{
    std::vector<double> terms;
    for (const auto& node : quad.nodes) {
        if ((node.point - x).norm() < radius + node.spacing) {
            terms.push_back(clipped_measure(node.cell, x, radius, 0));
        }
    }
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

double matching_radius(const SurfaceQuadrature& quad, const Vec3& x, double target)
{
    if (!(target > 0.0) || target > quad.total_area * (1.0 + 1e-12)) {
        throw Error(ErrorCode::TargetOutOfRange, "target must lie in (0, |boundary|]");
    }
    std::vector<std::pair<double, double>> by_distance;
    by_distance.reserve(quad.size());
    for (const auto& node : quad.nodes) {
        by_distance.emplace_back((node.point - x).norm(), node.weight);
    }
    std::sort(by_distance.begin(), by_distance.end());
    if (target >= quad.total_area * (1.0 - 1e-12)) {
        const double dmax = std::nextafter(by_distance.back().first, std::numeric_limits<double>::infinity());
        return std::max(dmax, quad.body_diameter);
    }
    double cumulative = 0.0;
    for (const auto& [d, w] : by_distance) {
        cumulative += w;
        if (cumulative >= target - 1e-12 * quad.total_area) {
            return std::nextafter(d, std::numeric_limits<double>::infinity());
        }
    }
    return std::max(std::nextafter(by_distance.back().first, std::numeric_limits<double>::infinity()),
        quad.body_diameter);
}

namespace {

// Sum of lengths of {t in [a,b] : inside(t)}, sampling plus bisection of transitions.
template <class Inside, class Measure>
double interval_measure(double a, double b, int samples, Inside&& inside, Measure&& measure)
{
    const double h = (b - a) / samples;
    double total = 0.0;
    double t_prev = a;
    bool in_prev = inside(a);
    double start = a;
    for (int k = 1; k <= samples; ++k) {
        const double t = a + k * h;
        const bool in = inside(t);
        if (in != in_prev) {
            double lo = t_prev;
            double hi = t;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (lo + hi);
                (inside(m) == in_prev ? lo : hi) = m;
            }
            const double cross = 0.5 * (lo + hi);
            if (in_prev) {
                total += measure(start, cross);
            } else {
                start = cross;
            }
        }
        t_prev = t;
        in_prev = in;
    }
    if (in_prev) {
        total += measure(start, b);
    }
    return total;
}

} // namespace

double sphere_cap_measure(const ConvexBody& body, const SurfacePoint& x, double radius, int resolution)
{
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::ParamError, "radius must be positive");
    }
    resolution = std::max(resolution, 16);
    auto inside_dir = [&](const Vec3& omega) {
        if (!(omega.dot(x.normal) < 0.0)) {
            return false;
        }
        return chord_length(body, x, omega) > radius;
    };
    const Vec3 inward = -x.normal;
    if (body.surface_dim() == 1) {
        const Vec3 tangent(-inward.y(), inward.x(), 0.0);
        auto inside = [&](double phi) {
            return inside_dir(std::cos(phi) * inward + std::sin(phi) * tangent);
        };
        const double angle = interval_measure(-0.5 * kPi, 0.5 * kPi, resolution, inside,
            [](double a, double b) { return b - a; });
        return radius * angle;
    }
    const Vec3 e1 = inward.unitOrthogonal();
    const Vec3 e2 = inward.cross(e1);
    const double dpsi = 2.0 * kPi / resolution;
    double total = 0.0;
    for (int j = 0; j < resolution; ++j) {
        const double psi = (j + 0.5) * dpsi;
        const Vec3 dir = std::cos(psi) * e1 + std::sin(psi) * e2;
        auto inside = [&](double theta) {
            return inside_dir(std::cos(theta) * inward + std::sin(theta) * dir);
        };
        total += interval_measure(0.0, 0.5 * kPi, resolution / 2, inside,
            [](double a, double b) { return std::cos(a) - std::cos(b); });
    }
    return radius * radius * dpsi * total;
}

double projection_measure(const ConvexBody& body, const Vec3& sigma)
{
    if (!body.is_polytope()) {
        throw Error(ErrorCode::NotPolytope, "projection identity needs a polytope");
    }
    const Vec3 dir = sigma.normalized();
    double total = 0.0;
    if (const auto* poly = std::get_if<Polygon2D>(&body.shape())) {
        const std::size_t m = poly->vertices.size();
        for (std::size_t e = 0; e < m; ++e) {
            const double len = (poly->vertices[(e + 1) % m] - poly->vertices[e]).norm();
            total += len * std::abs(poly->edges[e].normal.dot(dir));
        }
    } else {
        const auto& hull = std::get<Hull3D>(body.shape());
        for (std::size_t t = 0; t < hull.faces.size(); ++t) {
            const auto& f = hull.faces[t];
            const double a = 0.5
                * (hull.vertices[f[1]] - hull.vertices[f[0]]).cross(hull.vertices[f[2]] - hull.vertices[f[0]]).norm();
            total += a * std::abs(hull.facets[hull.face_facet[t]].normal.dot(dir));
        }
    }
    return 0.5 * total;
}

} // namespace fmc
