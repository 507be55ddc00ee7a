#pragma once

#include "fmc/types.hpp"

#include <vector>

namespace fmc {

/// Weighted directions on the unit sphere S^n (n = 1: circle in the xy-plane).
struct SphericalRule {
    int n = 1;
    std::vector<Vec3> directions;
    std::vector<double> weights;

    std::size_t size() const { return directions.size(); }
};

/// n = 1: `resolution` uniform angles (>= 8). n = 2: icosahedron refined
/// `resolution` times (>= 1), barycenters projected to the sphere with exact
/// spherical-triangle weights.
SphericalRule sphere_rule(int n, int resolution);

/// Quadrature value of the integral of |<sigma, tau>| over the sphere.
double abs_cosine_integral(const SphericalRule& rule, const Vec3& tau);

/// Inward half-sphere {<omega, nu> < 0} with nodes crowded toward the equator.
/// Elevation theta is measured from the tangent plane and graded as
/// theta = (pi/2) u^exponent with exponent 1 / (1 - alpha); weights are the
/// exact measures of the cells, so constants integrate exactly.
struct GradedHalfRule {
    int n = 1;
    Vec3 nu = Vec3::UnitY();
    double alpha = 0.5;
    double exponent = 2.0;
    int resolution = 0;
    std::vector<Vec3> directions;
    std::vector<double> weights;
    /// The same construction at half the elevation resolution, for error estimates.
    std::vector<Vec3> coarse_directions;
    std::vector<double> coarse_weights;

    std::size_t size() const { return directions.size(); }
};

inline constexpr int kDefaultHalfResolution1 = 720;
inline constexpr int kDefaultHalfResolution2 = 48;

/// n = 1: `resolution` nodes over (0, pi). n = 2: `resolution` elevation cells
/// times 2 * resolution azimuth cells. A non-positive resolution picks the default.
GradedHalfRule graded_half_rule(int n, const Vec3& nu, double alpha, int resolution = 0);

} // namespace fmc
