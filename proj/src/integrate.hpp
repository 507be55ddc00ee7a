#pragma once

// Adaptive cell integration shared by the nonlocal operators.

#include "fmc/geometry.hpp"

#include <array>

namespace fmc::detail {

struct Refine {
    double eta = 0.15;  ///< split while diameter > eta * distance
    int max_depth = 24; ///< hard cap on recursion depth
};

/// Integral over `cell` of kernel(y, normal(y)) for a kernel singular only at a
/// point x outside the cell (or on its boundary).
template <class Kernel>
double integrate_point(const Cell& cell, const Vec3& x, const Kernel& kernel, const Refine& opt, int depth = 0)
{
    const CellSample s = sample(cell);
    const double dist = (s.point - x).norm();
    if (depth < opt.max_depth && cell_diameter(cell) > opt.eta * dist) {
        std::array<Cell, 4> kids;
        const int count = split(cell, kids);
        double total = 0.0;
        for (int i = 0; i < count; ++i) {
            total += integrate_point(kids[i], x, kernel, opt, depth + 1);
        }
        return total;
    }
    return s.weight * kernel(s.point, s.normal);
}

/// Integral of kernel over cell intersected with the open ball B_R(x). Cells
/// inside the ball go to integrate_point; cells crossing the sphere are split
/// until they are smaller than 1e-4 R (curves) or 1e-3 R (surfaces) and then
/// counted by their midpoint.
template <class Kernel>
double integrate_clipped(
    const Cell& cell, const Vec3& x, double radius, const Kernel& kernel, const Refine& opt, int depth = 0)
{
    const CellSample s = sample(cell);
    const double diam = cell_diameter(cell);
    const double dist = (s.point - x).norm();
    if (dist + diam < radius) {
        return integrate_point(cell, x, kernel, opt);
    }
    if (dist - diam >= radius) {
        return 0.0;
    }
    if (depth >= 18 || diam < (cell.corner_count() == 3 ? 1e-3 : 1e-4) * radius) {
        return dist < radius ? s.weight * kernel(s.point, s.normal) : 0.0;
    }
    std::array<Cell, 4> kids;
    const int count = split(cell, kids);
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
        total += integrate_clipped(kids[i], x, radius, kernel, opt, depth + 1);
    }
    return total;
}

inline Vec3 lerp_on(const Cell& cell, const Vec3& a, const Vec3& b, double t)
{
    const Vec3 p = a + t * (b - a);
    if (cell.kind == CellKind::Arc || cell.kind == CellKind::SphericalTriangle) {
        return cell.aux + cell.radius * (p - cell.aux).normalized();
    }
    return p;
}

// Integral of |y - x|^(-gamma) over the flat triangle (x, a, b).
inline double apex_power_integral(const Vec3& x, const Vec3& a, const Vec3& b, double gamma)
{
    static constexpr std::array<double, 8> gx {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
        -0.1834346424956498, 0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
    static constexpr std::array<double, 8> gw {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
        0.3626837833783620, 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    const Vec3 ea = a - x;
    const Vec3 eb = b - x;
    const double phi = std::atan2(ea.cross(eb).norm(), ea.dot(eb));
    const Vec3 edge = b - a;
    const double h = ea.cross(edge).norm() / edge.norm();
    if (phi <= 0.0 || h <= 0.0) {
        return 0.0;
    }
    // Angle from xa to the foot of the perpendicular onto line ab.
    const double phi0 = std::acos(std::clamp(h / ea.norm(), -1.0, 1.0)) * (ea.dot(edge) < 0 ? 1.0 : -1.0);
    double total = 0.0;
    for (int k = 0; k < 8; ++k) {
        const double t = 0.5 * phi * (gx[k] + 1.0);
        const double r = h / std::cos(t - phi0);
        total += gw[k] * std::pow(r, 2.0 - gamma);
    }
    return 0.5 * phi * total / (2.0 - gamma);
}

/// Integral over a cell containing x of a kernel behaving like c |y - x|^(-gamma)
/// near x. The cell is fanned around x with radial levels graded toward x; the
/// innermost piece is integrated against the model singularity.
template <class Kernel>
double integrate_singular(
    const Cell& cell, const Vec3& x, const Kernel& kernel, double gamma, const Refine& opt, int levels = 24)
{
    const int dim = cell.corner_count() - 1;
    const double radial = std::max(0.0, gamma - (dim - 1));
    const double q = 1.0 / (1.0 - std::min(radial, 0.95));
    std::vector<double> t(levels + 1);
    for (int k = 0; k <= levels; ++k) {
        t[k] = std::pow(static_cast<double>(k) / levels, q);
    }
    double total = 0.0;
    if (dim == 1) {
        const double span = (cell.v[1] - cell.v[0]).norm();
        for (int side = 0; side < 2; ++side) {
            const Vec3& end = cell.v[side];
            if ((end - x).norm() <= 1e-10 * span) {
                continue;
            }
            const Vec3 p1 = lerp_on(cell, x, end, t[1]);
            const double len = (p1 - x).norm();
            if (len <= 0.0) {
                continue;
            }
            Cell inner = cell;
            inner.v = {x, p1, x};
            const CellSample s = sample(inner);
            const double c = kernel(s.point, s.normal) * std::pow((s.point - x).norm(), gamma);
            total += c * std::pow(len, 1.0 - gamma) / (1.0 - gamma) * (s.weight / len);
            for (int k = 1; k < levels; ++k) {
                Cell piece = cell;
                piece.v = {lerp_on(cell, x, end, t[k]), lerp_on(cell, x, end, t[k + 1]), x};
                if (side == 0) {
                    std::swap(piece.v[0], piece.v[1]);
                }
                total += integrate_point(piece, x, kernel, opt);
            }
        }
        return total;
    }
    for (int e = 0; e < 3; ++e) {
        const Vec3& a = cell.v[e];
        const Vec3& b = cell.v[(e + 1) % 3];
        if ((a - x).cross(b - x).norm() <= 1e-14 * (b - a).squaredNorm()) {
            continue;
        }
        const Vec3 a1 = lerp_on(cell, x, a, t[1]);
        const Vec3 b1 = lerp_on(cell, x, b, t[1]);
        Cell inner = cell;
        inner.v = {x, a1, b1};
        const CellSample s = sample(inner);
        const double c = kernel(s.point, s.normal) * std::pow((s.point - x).norm(), gamma);
        const double flat = 0.5 * (a1 - x).cross(b1 - x).norm();
        total += c * apex_power_integral(x, a1, b1, gamma) * (flat > 0 ? s.weight / flat : 1.0);
        for (int k = 1; k < levels; ++k) {
            const Vec3 ak = lerp_on(cell, x, a, t[k]);
            const Vec3 bk = lerp_on(cell, x, b, t[k]);
            const Vec3 an = lerp_on(cell, x, a, t[k + 1]);
            const Vec3 bn = lerp_on(cell, x, b, t[k + 1]);
            Cell p1 = cell;
            p1.v = {ak, bk, an};
            Cell p2 = cell;
            p2.v = {bk, bn, an};
            total += integrate_point(p1, x, kernel, opt) + integrate_point(p2, x, kernel, opt);
        }
    }
    return total;
}

/// Double integral over cells a and b of kernel(y1, n1, y2, n2). `same` marks
/// the diagonal pair a == b, whose children are paired exhaustively; the
/// diagonal remainder at the depth cap is dropped (it vanishes with the cell size
/// for the integrands used here).
template <class Kernel>
double integrate_pair(const Cell& a, const Cell& b, bool same, const Kernel& kernel, const Refine& opt, int depth = 0)
{
    if (same) {
        if (depth >= opt.max_depth) {
            return 0.0;
        }
        std::array<Cell, 4> kids;
        const int count = split(a, kids);
        double total = 0.0;
        for (int i = 0; i < count; ++i) {
            for (int j = 0; j < count; ++j) {
                total += integrate_pair(kids[i], kids[j], i == j, kernel, opt, depth + 1);
            }
        }
        return total;
    }
    const CellSample sa = sample(a);
    const CellSample sb = sample(b);
    const double dist = (sa.point - sb.point).norm();
    const double da = cell_diameter(a);
    const double db = cell_diameter(b);
    if (depth < opt.max_depth && std::max(da, db) > opt.eta * dist) {
        std::array<Cell, 4> kids;
        double total = 0.0;
        if (da >= db) {
            const int count = split(a, kids);
            for (int i = 0; i < count; ++i) {
                total += integrate_pair(kids[i], b, false, kernel, opt, depth + 1);
            }
        } else {
            const int count = split(b, kids);
            for (int i = 0; i < count; ++i) {
                total += integrate_pair(a, kids[i], false, kernel, opt, depth + 1);
            }
        }
        return total;
    }
    return sa.weight * sb.weight * kernel(sa.point, sa.normal, sb.point, sb.normal);
}

} // namespace fmc::detail
