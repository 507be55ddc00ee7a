#pragma once

#include "fmc/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace fmc::detail {

/// Andrew's monotone chain; strict hull (collinear points dropped), counter-clockwise.
std::vector<Eigen::Vector2d> convex_hull_2d(std::span<const Eigen::Vector2d> points);

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};

/// Incremental hull in R^3, outward-oriented triangles, unused points removed.
/// Intended for points in general position (random samples); throws Degenerate
/// when all points are coplanar.
TriangleMesh convex_hull_3d(std::span<const Vec3> points);

} // namespace fmc::detail
