#include "hull.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fmc::detail {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

} // namespace

std::vector<Eigen::Vector2d> convex_hull_2d(std::span<const Eigen::Vector2d> points)
{
    std::vector<Eigen::Vector2d> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Eigen::Vector2d> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0) {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

TriangleMesh convex_hull_3d(std::span<const Vec3> points)
{
    const int count = static_cast<int>(points.size());
    if (count < 4) {
        throw Error(ErrorCode::Degenerate, "hull needs at least 4 points");
    }
    double scale = 0.0;
    for (const auto& p : points) {
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    }
    const double eps = 1e-12 * std::max(scale, 1.0);

    // Initial tetrahedron from extreme, well-separated points.
    int i0 = 0;
    int i1 = -1;
    for (int i = 1; i < count; ++i) {
        if ((points[i] - points[i0]).norm() > eps) {
            i1 = i;
            break;
        }
    }
    int i2 = -1;
    double best = 0.0;
    for (int i = 0; i < count && i1 >= 0; ++i) {
        const double a = (points[i1] - points[i0]).cross(points[i] - points[i0]).norm();
        if (a > best) {
            best = a;
            i2 = i;
        }
    }
    int i3 = -1;
    best = 0.0;
    for (int i = 0; i < count && i2 >= 0; ++i) {
        const Vec3 nrm = (points[i1] - points[i0]).cross(points[i2] - points[i0]);
        const double v = std::abs(nrm.dot(points[i] - points[i0]));
        if (v > best) {
            best = v;
            i3 = i;
        }
    }
    if (i1 < 0 || i2 < 0 || i3 < 0 || best <= eps * scale * scale) {
        throw Error(ErrorCode::Degenerate, "points are coplanar");
    }

    std::vector<std::array<int, 3>> faces;
    auto add_face = [&](int a, int b, int c, const Vec3& inside) {
        const Vec3 nrm = (points[b] - points[a]).cross(points[c] - points[a]);
        if (nrm.dot(inside - points[a]) > 0) {
            std::swap(b, c);
        }
        faces.push_back({a, b, c});
    };
    const Vec3 inside = 0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);
    add_face(i0, i1, i2, inside);
    add_face(i0, i1, i3, inside);
    add_face(i0, i2, i3, inside);
    add_face(i1, i2, i3, inside);

    auto visible = [&](const std::array<int, 3>& f, const Vec3& p) {
        const Vec3 nrm = (points[f[1]] - points[f[0]]).cross(points[f[2]] - points[f[0]]);
        const double len = nrm.norm();
        return nrm.dot(p - points[f[0]]) > eps * len;
    };

    for (int i = 0; i < count; ++i) {
        if (i == i0 || i == i1 || i == i2 || i == i3) {
            continue;
        }
        std::vector<char> vis(faces.size(), 0);
        bool any = false;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            vis[f] = visible(faces[f], points[i]);
            any = any || vis[f];
        }
        if (!any) {
            continue;
        }
        std::set<std::pair<int, int>> edges;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (vis[f]) {
                for (int e = 0; e < 3; ++e) {
                    edges.insert({faces[f][e], faces[f][(e + 1) % 3]});
                }
            }
        }
        std::vector<std::array<int, 3>> kept;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!vis[f]) {
                kept.push_back(faces[f]);
            }
        }
        for (const auto& [a, b] : edges) {
            if (!edges.contains({b, a})) {
                kept.push_back({a, b, i});
            }
        }
        faces = std::move(kept);
    }

    TriangleMesh mesh;
    std::map<int, int> remap;
    for (auto& f : faces) {
        for (int& v : f) {
            auto [it, inserted] = remap.try_emplace(v, static_cast<int>(mesh.vertices.size()));
            if (inserted) {
                mesh.vertices.push_back(points[v]);
            }
            v = it->second;
        }
    }
    mesh.faces = std::move(faces);
    return mesh;
}

} // namespace fmc::detail
