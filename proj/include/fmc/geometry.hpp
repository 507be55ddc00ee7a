#pragma once

#include "fmc/types.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace fmc {

// ---------------------------------------------------------------------------
// Convex bodies
// ---------------------------------------------------------------------------

/// Supporting hyperplane {y : normal . y = offset} of a facet, normal outward.
struct Plane {
    Vec3 normal;
    double offset = 0.0;

    double signed_distance(const Vec3& y) const { return normal.dot(y) - offset; }
};

/// Strictly convex polygon in the plane z = 0, vertices counter-clockwise.
struct Polygon2D {
    std::vector<Vec3> vertices;
    std::vector<Plane> edges; ///< edges[i] supports vertices[i] -> vertices[i+1]
};

/// Closed triangulated convex polytope in R^3. Coplanar triangles share a facet.
struct Hull3D {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces; ///< counter-clockwise seen from outside
    std::vector<int> face_facet;           ///< facet id of every triangle
    std::vector<Plane> facets;             ///< one plane per facet
    /// Segments separating two different facets (the true polytope edges).
    std::vector<std::array<Vec3, 2>> ridges;
};

struct Ball {
    int dim = 2; ///< ambient dimension, 2 or 3
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

/// Raw data for make_body.
struct PolygonDesc {
    std::vector<Eigen::Vector2d> vertices;
};
struct HullDesc {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};
struct BallDesc {
    int dim = 2;
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};
using BodyDescription = std::variant<PolygonDesc, HullDesc, BallDesc>;

/// A validated bounded convex body in R^2 or R^3. Immutable after construction.
class ConvexBody {
public:
    using Shape = std::variant<Polygon2D, Hull3D, Ball>;

    const Shape& shape() const { return shape_; }
    /// Dimension n of the boundary hypersurface (ambient dimension n + 1).
    int surface_dim() const;
    bool is_polytope() const { return !std::holds_alternative<Ball>(shape_); }
    /// Outward supporting planes of all facets (empty for balls).
    std::span<const Plane> planes() const;
    /// Vertices of a polytope (empty for balls).
    std::span<const Vec3> vertices() const;
    Vec3 centroid() const;

    friend ConvexBody make_body(const BodyDescription& description);

private:
    explicit ConvexBody(Shape shape) : shape_(std::move(shape)) { }
    Shape shape_;
};

/// Validates raw data; re-orients clockwise polygons and merges collinear vertices.
/// Throws NonConvex or Degenerate.
ConvexBody make_body(const BodyDescription& description);

// Constructors for common bodies.
ConvexBody polygon_from_points(std::span<const Eigen::Vector2d> points);
ConvexBody hull_from_points(std::span<const Vec3> points);
ConvexBody regular_polygon(int k, double circumradius, double phase = 0.0);
ConvexBody rectangle(double width, double height);
ConvexBody box(double a, double b, double c);
ConvexBody icosahedron(double circumradius = 1.0);
ConvexBody disk(double radius = 1.0);
ConvexBody sphere_ball(double radius = 1.0);

/// The body scaled by lambda about the origin.
ConvexBody scaled(const ConvexBody& body, double lambda);
/// The body under the rotation (for polygons, only rotations about z are valid).
ConvexBody rotated(const ConvexBody& body, const Eigen::Matrix3d& rotation);

/// |boundary| (length for n = 1, area for n = 2).
double perimeter(const ConvexBody& body);
/// Enclosed (n+1)-volume.
double area(const ConvexBody& body);
double diameter(const ConvexBody& body);

/// Open-set membership (strict inequalities against every facet).
bool contains(const ConvexBody& body, const Vec3& y);

// ---------------------------------------------------------------------------
// Surface discretization
// ---------------------------------------------------------------------------

enum class CellKind : std::uint8_t { Segment, Arc, Triangle, SphericalTriangle };

/// A piece of the boundary. Flat cells carry their normal in `aux`; curved cells
/// carry the sphere center in `aux` and the radius in `radius`.
struct Cell {
    CellKind kind = CellKind::Segment;
    std::array<Vec3, 3> v;
    Vec3 aux = Vec3::Zero();
    double radius = 0.0;

    int corner_count() const { return (kind == CellKind::Segment || kind == CellKind::Arc) ? 2 : 3; }
};

/// Midpoint sample of a cell: representative point, outward normal, exact measure.
struct CellSample {
    Vec3 point;
    Vec3 normal;
    double weight;
};

CellSample sample(const Cell& cell);
/// Splits into 2 (curves) or 4 (triangles) children; returns the count written.
int split(const Cell& cell, std::array<Cell, 4>& children);
double cell_diameter(const Cell& cell);
/// Barycentric-style containment of a point of the same facet/sphere.
bool cell_contains(const Cell& cell, const Vec3& y);

struct SurfaceNode {
    Vec3 point;
    Vec3 normal;
    double weight;
    int facet; ///< facet id on polytopes; -1 on balls
    Cell cell;
    double spacing;       ///< local mesh size (cell diameter)
    double edge_distance; ///< distance to the boundary of the facet (inf on balls)
};

/// Nodes discretizing the boundary measure. Nodes sit strictly inside facets.
struct SurfaceQuadrature {
    int n = 1;
    bool polytope = true;
    int resolution = 0;
    std::vector<SurfaceNode> nodes;
    double total_area = 0.0;
    double body_diameter = 0.0;

    std::size_t size() const { return nodes.size(); }
};

/// Minimum resolutions: polygon 1 sub-segment per edge, Hull3D frequency 1,
/// disk 8 arcs, 3-ball 1 icosahedral subdivision level.
SurfaceQuadrature surface_quadrature(const ConvexBody& body, int resolution);

/// A boundary point with its outward normal and distance to its facet's boundary.
struct SurfacePoint {
    Vec3 point;
    Vec3 normal;
    int facet = -1;
    double edge_distance = std::numeric_limits<double>::infinity();
    int node = -1; ///< quadrature node this point coincides with, if any
};

SurfacePoint surface_point(const SurfaceQuadrature& quad, int node);
/// Locates a point assumed to lie on the boundary.
SurfacePoint locate(const ConvexBody& body, const Vec3& y);

/// Boolean selection of quadrature nodes.
struct NodeSubset {
    std::vector<char> mask;
    double measure = 0.0;

    bool contains(std::size_t i) const { return mask[i] != 0; }
};

NodeSubset make_subset(const SurfaceQuadrature& quad, std::vector<char> mask);
NodeSubset complement(const SurfaceQuadrature& quad, const NodeSubset& subset);
NodeSubset full_subset(const SurfaceQuadrature& quad);
/// Nodes with |y - x| < radius.
NodeSubset ball_subset(const SurfaceQuadrature& quad, const Vec3& x, double radius);

// ---------------------------------------------------------------------------
// Geometric queries
// ---------------------------------------------------------------------------

/// sup{t > 0 : x + t omega in body} for an inward direction; throws NotInward.
double chord_length(const ConvexBody& body, const SurfacePoint& x, const Vec3& omega);

/// Sum of node weights within distance radius of x.
double ball_patch_measure(const SurfaceQuadrature& quad, const Vec3& x, double radius);

/// Measure of the boundary inside the open ball B_R(x), with the cells that cross
/// the sphere clipped rather than counted whole.
double clipped_patch_measure(const SurfaceQuadrature& quad, const Vec3& x, double radius);

/// Smallest node-distance radius R with ball_patch_measure(R) >= target.
/// Throws TargetOutOfRange unless 0 < target <= total_area.
double matching_radius(const SurfaceQuadrature& quad, const Vec3& x, double target);

/// Measure of the sphere of radius R about x that lies inside the body.
double sphere_cap_measure(const ConvexBody& body, const SurfacePoint& x, double radius,
    int resolution = 512);

/// Shadow measure |K_sigma| via the face-sum identity. Throws NotPolytope.
double projection_measure(const ConvexBody& body, const Vec3& sigma);

} // namespace fmc
