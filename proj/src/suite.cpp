#include "fmc/suite.hpp"

#include "fmc/io.hpp"
#include "parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>

namespace fmc {

namespace {

constexpr double kPi = std::numbers::pi;

// Mesh levels of the fitted-constant studies (base level; drift is measured one level up).
constexpr int kSubsetLevel1 = 2;
constexpr int kSubsetLevel2 = 1;
constexpr int kSobolevLevel1 = 2;
constexpr int kSobolevLevel2 = 0;

std::uint64_t splitmix(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::string numbered(const std::string& stem, int index)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "-%03d", index);
    return stem + buf;
}

Eigen::Matrix3d random_rotation(Rng& rng)
{
    // Uniform unit quaternion (Shoemake).
    const double u1 = rng.uniform();
    const double u2 = rng.uniform(0.0, 2.0 * kPi);
    const double u3 = rng.uniform(0.0, 2.0 * kPi);
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    Eigen::Quaterniond q(b * std::cos(u3), a * std::sin(u2), a * std::cos(u2), b * std::sin(u3));
    return q.normalized().toRotationMatrix();
}

Eigen::Matrix3d rotation_z(double angle)
{
    return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
}

Vec3 random_direction(Rng& rng)
{
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const double r = std::sqrt(1.0 - z * z);
    return {r * std::cos(phi), r * std::sin(phi), z};
}

CorpusBody planar_body(int index, std::uint64_t seed)
{
    Rng rng(seed);
    switch (index % 4) {
    case 0: {
        const int k = rng.integer(3, 12);
        return {numbered("kgon" + std::to_string(k), index), "kgon", seed,
            regular_polygon(k, rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * kPi / k))};
    }
    case 1: {
        const int m = rng.integer(5, 16);
        const double b = rng.uniform(0.2, 1.0);
        const double turn = rng.uniform(0.0, 2.0 * kPi);
        PolygonDesc desc;
        for (int j = 0; j < m; ++j) {
            const double t = 2.0 * kPi * (j + rng.uniform(0.1, 0.9)) / m;
            const Eigen::Vector2d p(std::cos(t), b * std::sin(t));
            desc.vertices.push_back(Eigen::Rotation2Dd(turn) * p);
        }
        return {numbered("ellipse" + std::to_string(m), index), "ellipse-hull", seed, make_body(desc)};
    }
    case 2: {
        const double aspect = std::pow(10.0, rng.uniform(0.0, 2.0));
        return {numbered("rect", index), "rectangle", seed,
            rotated(rectangle(1.0, 1.0 / aspect), rotation_z(rng.uniform(0.0, kPi)))};
    }
    default:
        return {numbered("disk", index), "disk", seed, disk(rng.uniform(0.5, 2.0))};
    }
}

CorpusBody solid_body(int index, std::uint64_t seed)
{
    Rng rng(seed);
    switch (index % 4) {
    case 0: {
        const int m = rng.integer(10, 24);
        const Vec3 axes(1.0, rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0));
        const Eigen::Matrix3d rot = random_rotation(rng);
        std::vector<Vec3> pts;
        for (int j = 0; j < m; ++j) {
            pts.push_back(rot * random_direction(rng).cwiseProduct(axes));
        }
        return {numbered("ellipsoid" + std::to_string(m), index), "ellipsoid-hull", seed, hull_from_points(pts)};
    }
    case 1: {
        const double b = std::pow(10.0, -rng.uniform(0.0, 1.0));
        const double c = std::pow(10.0, -rng.uniform(0.0, 2.0));
        return {numbered("box", index), "box", seed, rotated(box(1.0, b, c), random_rotation(rng))};
    }
    case 2:
        return {numbered("icosa", index), "icosahedron", seed, icosahedron(rng.uniform(0.5, 2.0))};
    default:
        return {numbered("ball", index), "ball", seed, sphere_ball(rng.uniform(0.5, 2.0))};
    }
}

// ---------------------------------------------------------------------------

void tag(InequalityReport& r, const CorpusBody& cb, int resolution)
{
    r.body = cb.name;
    r.seed = cb.seed;
    r.resolution = resolution;
}

/// Runs `job(i)` for every instance and concatenates the reports in index order.
std::vector<InequalityReport> collect(std::size_t count, const std::function<std::vector<InequalityReport>(std::size_t)>& job)
{
    std::vector<std::vector<InequalityReport>> slots(count);
    detail::parallel_for(count, [&](std::size_t i) { slots[i] = job(i); });
    std::vector<InequalityReport> out;
    for (auto& s : slots) {
        std::move(s.begin(), s.end(), std::back_inserter(out));
    }
    return out;
}

/// Evenly spread node indices with a seeded offset.
std::vector<int> pick_nodes(const SurfaceQuadrature& q, int count, std::uint64_t seed)
{
    Rng rng(seed);
    const int size = static_cast<int>(q.size());
    const int offset = rng.integer(0, size - 1);
    std::vector<int> out;
    for (int k = 0; k < count; ++k) {
        out.push_back((offset + k * size / count) % size);
    }
    return out;
}

std::vector<CorpusBody> both_corpora(const SuiteOptions& o, int count_1d, int count_2d)
{
    auto all = make_corpus(1, count_1d, o.seed);
    auto solids = make_corpus(2, count_2d, o.seed);
    all.insert(all.end(), solids.begin(), solids.end());
    return all;
}

/// A fitted-constant family: ratios at the base and refined resolution for
/// every instance, plus the base reports computed with constant 1.
struct FittedGroup {
    std::string check;
    Params params;
    std::vector<double> base;
    std::vector<double> refined;
    std::vector<InequalityReport> reports;
};

double max_finite(const std::vector<double>& xs)
{
    double m = 0.0;
    for (double x : xs) {
        if (std::isfinite(x)) {
            m = std::max(m, x);
        }
    }
    return m;
}

std::string param_label(const std::string& check, const Params& p)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s[n=%d,alpha=%g,s=%g,p=%g]", check.c_str(), p.n, p.alpha, p.s, p.p);
    return buf;
}

/// Fits C as the largest base ratio, rescales the reports and appends a drift record.
double finish_group(FittedGroup& g, std::vector<InequalityReport>& out, std::uint64_t seed)
{
    if (g.base.empty()) {
        return 0.0;
    }
    const double c = max_finite(g.base);
    const double c_refined = max_finite(g.refined);
    for (auto& r : g.reports) {
        out.push_back(with_constant(std::move(r), c));
    }
    auto drift = identity_report("fitted_constant_drift", g.params, c_refined, c, 0.05 * c);
    drift.body = param_label(g.check, g.params);
    drift.constant = c;
    drift.provenance = Provenance::Fitted;
    drift.seed = seed;
    drift.extras = {{"C_base", c}, {"C_refined", c_refined}, {"relative_drift", c > 0.0 ? std::abs(c_refined / c - 1.0) : 0.0},
        {"instances", static_cast<double>(g.base.size())}};
    drift.note = "fitted constant at the base resolution vs the refined resolution";
    out.push_back(std::move(drift));
    return c;
}

Params params_for(int n, double alpha, double s, double p)
{
    Params params;
    params.n = n;
    params.alpha = alpha;
    params.s = s;
    params.p = p;
    return params;
}

// A boundary set given by a predicate on positions, so that the same set can be
// sampled on meshes of different resolution.
using Region = std::function<bool(const Vec3&)>;

NodeSubset sample_region(const SurfaceQuadrature& q, const Region& region)
{
    std::vector<char> mask(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        mask[i] = region(q.nodes[i].point) ? 1 : 0;
    }
    return make_subset(q, std::move(mask));
}

/// Ball around x plus `extra` balls around random boundary nodes.
Region random_region(const SurfaceQuadrature& q, const Vec3& x, double scale, int extra, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::pair<Vec3, double>> balls {{x, scale * rng.uniform(0.1, 0.35)}};
    for (int k = 0; k < extra; ++k) {
        const auto& node = q.nodes[static_cast<std::size_t>(rng.integer(0, static_cast<int>(q.size()) - 1))];
        balls.emplace_back(node.point, scale * rng.uniform(0.05, 0.25));
    }
    return [balls](const Vec3& y) {
        for (const auto& [c, r] : balls) {
            if ((y - c).norm() < r) {
                return true;
            }
        }
        return false;
    };
}

// ---------------------------------------------------------------------------
// Suite section2: double layer potential, curvature interpolation, global bounds.

std::vector<InequalityReport> section2(const SuiteOptions& o)
{
    const auto corpus = both_corpora(o, o.bodies_1d, o.bodies_2d);
    auto out = collect(corpus.size(), [&](std::size_t i) {
        const auto& cb = corpus[i];
        const int res = suite_resolution(cb.body);
        const auto q = surface_quadrature(cb.body, res);
        const int n = q.n;
        std::vector<InequalityReport> reports;

        std::vector<SurfacePoint> points;
        for (int node : pick_nodes(q, 4, derive_seed(cb.seed, 1))) {
            points.push_back(surface_point(q, node));
        }
        reports.push_back(check_gauss_law(q, points, 0.02 * sphere_measure(n) / 2.0));

        for (double alpha : {0.25, 0.5, 0.75}) {
            const auto h = node_curvatures(cb.body, q, alpha);
            for (auto& r : check_pointwise_global(q, h, alpha, 0.5)) {
                reports.push_back(std::move(r));
            }
            if (alpha == 0.5) {
                const NodeSubset all = full_subset(q);
                for (const auto& x : std::span(points).first(2)) {
                    const NodeSubset patch = ball_subset(q, x.point, 0.3 * q.body_diameter);
                    reports.push_back(check_curvature_interpolation(q, x, all, alpha, h[x.node]));
                    reports.push_back(check_curvature_interpolation(q, x, patch, alpha, h[x.node]));
                }
            }
        }
        for (auto& r : reports) {
            tag(r, cb, res);
        }
        return reports;
    });

    const int flats = 20;
    auto flat = collect(flats, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(o.seed, 5000 + i);
        Rng rng(seed);
        FlatSet E;
        E.n = 1 + static_cast<int>(i % 2);
        E.h = 0.1;
        const int cells = rng.integer(5, 40);
        for (int k = 0; k < cells; ++k) {
            E.cells.push_back({rng.integer(-6, 6), E.n == 1 ? 0 : rng.integer(-6, 6)});
        }
        const auto c = E.cells[static_cast<std::size_t>(rng.integer(0, cells - 1))];
        const Vec3 x((c[0] + rng.uniform(0.05, 0.95)) * E.h, E.n == 1 ? 0.0 : (c[1] + rng.uniform(0.05, 0.95)) * E.h, 0.0);
        const double alpha = 0.25 * (1 + static_cast<int>(i % 3));
        auto r = check_savin_valdinoci_flat(E, x, alpha);
        r.body = numbered("flat" + std::to_string(E.n) + "d", static_cast<int>(i));
        r.seed = seed;
        return std::vector<InequalityReport> {r};
    });
    out.insert(out.end(), flat.begin(), flat.end());
    return out;
}

// ---------------------------------------------------------------------------
// Suite section3: localization, reverse isoperimetry, rearrangement, subsets.

std::vector<InequalityReport> section3(const SuiteOptions& o)
{
    std::vector<InequalityReport> out;
    const auto corpus = both_corpora(o, 12, 8);

    // Localized identity, perimeter growth and the reverse isoperimetric ratios.
    struct Local {
        std::vector<InequalityReport> reports;
        std::vector<double> base;
        std::vector<double> refined;
        std::vector<InequalityReport> fitted;
    };
    std::vector<Local> local(corpus.size());
    detail::parallel_for(corpus.size(), [&](std::size_t i) {
        const auto& cb = corpus[i];
        const int res = suite_resolution(cb.body);
        const auto q = surface_quadrature(cb.body, res);
        const auto q2 = surface_quadrature(cb.body, suite_resolution(cb.body, 1));
        const auto h = node_curvatures(cb.body, q, 0.5);
        auto& L = local[i];
        for (int node : pick_nodes(q, 2, derive_seed(cb.seed, 2))) {
            const SurfacePoint x = surface_point(q, node);
            const SurfacePoint x2 = locate(cb.body, x.point);
            for (double frac : {0.15, 0.4}) {
                const double R = frac * q.body_diameter;
                for (auto& r : check_localized_identity(cb.body, q, x, R, 0.5, h[node])) {
                    L.reports.push_back(std::move(r));
                }
                L.reports.push_back(check_perimeter_growth(q, x.point, R));
                L.base.push_back(reverse_isoperimetric_ratio(cb.body, q, x, R));
                L.refined.push_back(reverse_isoperimetric_ratio(cb.body, q2, x2, R));
                L.fitted.push_back(check_reverse_isoperimetric(cb.body, q, x, R, 1.0));
            }
        }
        for (auto* v : {&L.reports, &L.fitted}) {
            for (auto& r : *v) {
                tag(r, cb, res);
            }
        }
    });
    std::map<int, FittedGroup> reverse;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto& g = reverse[corpus[i].body.surface_dim()];
        g.check = "reverse_isoperimetric";
        g.params = params_for(corpus[i].body.surface_dim(), 0.5, 0.5, 1.0);
        auto& L = local[i];
        std::move(L.reports.begin(), L.reports.end(), std::back_inserter(out));
        g.base.insert(g.base.end(), L.base.begin(), L.base.end());
        g.refined.insert(g.refined.end(), L.refined.begin(), L.refined.end());
        std::move(L.fitted.begin(), L.fitted.end(), std::back_inserter(g.reports));
    }
    std::map<int, double> c_n;
    for (auto& [n, g] : reverse) {
        c_n[n] = finish_group(g, out, o.seed);
    }

    // Rearrangement on circle and sphere meshes.
    const ConvexBody circle = disk(1.0);
    const ConvexBody sphere = sphere_ball(1.0);
    const auto qc = surface_quadrature(circle, 128);
    const auto qs = surface_quadrature(sphere, 2);
    const int subsets = 200;
    auto rearr = collect(subsets, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(o.seed, 7000 + i);
        const bool flat = i % 2 == 0;
        const auto& q = flat ? qc : qs;
        Rng rng(seed);
        const SurfacePoint x = surface_point(q, rng.integer(0, static_cast<int>(q.size()) - 1));
        const NodeSubset E = sample_region(q, random_region(q, x.point, 2.0, rng.integer(0, 4), derive_seed(seed, 1)));
        const double sp = 0.25 * (1 + static_cast<int>((i / 2) % 3));
        auto r = check_rearrangement(q, x, E, sp);
        r.body = numbered(flat ? "circle" : "sphere", static_cast<int>(i));
        r.seed = seed;
        return std::vector<InequalityReport> {r};
    });
    out.insert(out.end(), rearr.begin(), rearr.end());

    // Pointwise subset inequality with its dichotomy branch.
    const auto subset_corpus = both_corpora(o, 8, 4);
    const std::vector<std::pair<double, double>> grid {{0.25, 1.0}, {0.5, 1.5}};
    struct Sub {
        std::vector<std::vector<double>> base;
        std::vector<std::vector<double>> refined;
        std::vector<std::vector<InequalityReport>> reports;
    };
    std::vector<Sub> subs(subset_corpus.size());
    detail::parallel_for(subset_corpus.size(), [&](std::size_t i) {
        const auto& cb = subset_corpus[i];
        const int n = cb.body.surface_dim();
        const int level = n == 1 ? kSubsetLevel1 : kSubsetLevel2;
        const int res = suite_resolution(cb.body, level);
        const auto q = surface_quadrature(cb.body, res);
        const auto q2 = surface_quadrature(cb.body, suite_resolution(cb.body, level + 1));
        const auto h = node_curvatures(cb.body, q, 0.5);
        auto& S = subs[i];
        S.base.resize(grid.size());
        S.refined.resize(grid.size());
        S.reports.resize(grid.size());
        int k = 0;
        for (int node : pick_nodes(q, 2, derive_seed(cb.seed, 3))) {
            const SurfacePoint x = surface_point(q, node);
            const SurfacePoint x2 = locate(cb.body, x.point);
            const double h2 = halpha_chord(cb.body, x2, 0.5).value;
            for (int extra : {0, 2}) {
                const Region region = random_region(q, x.point, q.body_diameter, extra, derive_seed(cb.seed, 10 + k++));
                const NodeSubset E = sample_region(q, region);
                const NodeSubset E2 = sample_region(q2, region);
                for (std::size_t g = 0; g < grid.size(); ++g) {
                    const Params params = params_for(n, 0.5, grid[g].first, grid[g].second);
                    S.base[g].push_back(pointwise_subset_ratio(q, x, E, params, h[node]));
                    S.refined[g].push_back(pointwise_subset_ratio(q2, x2, E2, params, h2));
                    auto r = check_pointwise_subset(q, x, E, params, h[node], 1.0, c_n.at(n));
                    tag(r, cb, res);
                    S.reports[g].push_back(std::move(r));
                }
            }
        }
    });
    for (int n : {1, 2}) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            FittedGroup group;
            group.check = "pointwise_subset";
            group.params = params_for(n, 0.5, grid[g].first, grid[g].second);
            for (std::size_t i = 0; i < subset_corpus.size(); ++i) {
                if (subset_corpus[i].body.surface_dim() != n) {
                    continue;
                }
                auto& S = subs[i];
                group.base.insert(group.base.end(), S.base[g].begin(), S.base[g].end());
                group.refined.insert(group.refined.end(), S.refined[g].begin(), S.refined[g].end());
                std::move(S.reports[g].begin(), S.reports[g].end(), std::back_inserter(group.reports));
            }
            finish_group(group, out, o.seed);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Suite section4: Sobolev forms, coarea, slicing sums and the level-set series.

/// Non-negative test fields on a body, scaled to its size.
std::vector<std::pair<std::string, std::function<double(const Vec3&)>>> test_fields(
    const SurfaceQuadrature& q, const Vec3& center, std::uint64_t seed)
{
    Rng rng(seed);
    const double d = q.body_diameter;
    std::vector<std::pair<std::string, std::function<double(const Vec3&)>>> fields;
    for (int k = 0; k < 2; ++k) {
        const Vec3 p = q.nodes[static_cast<std::size_t>(rng.integer(0, static_cast<int>(q.size()) - 1))].point;
        const double rho = d * rng.uniform(0.2, 0.6);
        fields.emplace_back("tent", [p, rho](const Vec3& y) { return std::max(0.0, 1.0 - (y - p).norm() / rho); });
        const double width = d * rng.uniform(0.1, 0.3);
        const double amp = rng.uniform(0.5, 4.0);
        fields.emplace_back("bump", [p, width, amp](const Vec3& y) {
            return amp * std::exp(-(y - p).squaredNorm() / (width * width));
        });
        Vec3 e = random_direction(rng);
        if (q.n == 1) {
            e.z() = 0.0;
            e.normalize();
        }
        const double freq = rng.integer(1, 2);
        fields.emplace_back("cosine", [e, freq, d, center](const Vec3& y) {
            return 1.0 + std::cos(2.0 * kPi * freq * e.dot(y - center) / d);
        });
        const double cap = d * rng.uniform(0.15, 0.5);
        fields.emplace_back("cap", [p, cap](const Vec3& y) { return (y - p).norm() < cap ? 1.0 : 0.0; });
    }
    return fields;
}

std::vector<double> sample_values(const SurfaceQuadrature& q, const std::function<double(const Vec3&)>& f)
{
    std::vector<double> v(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        v[i] = f(q.nodes[i].point);
    }
    return v;
}

std::vector<InequalityReport> section4(const SuiteOptions& o)
{
    std::vector<InequalityReport> out;
    const auto corpus = both_corpora(o, 8, 3);
    const std::vector<std::pair<double, double>> grid {{0.25, 1.0}, {0.5, 1.0}, {0.25, 2.0}};
    const std::vector<std::string> checks {"set_sobolev", "function_sobolev", "level_set_series"};

    // groups[check][grid] per body, merged per n afterwards.
    struct Body {
        std::vector<std::vector<double>> base;
        std::vector<std::vector<double>> refined;
        std::vector<std::vector<InequalityReport>> reports;
    };
    const std::size_t slots = checks.size() * grid.size();
    std::vector<Body> bodies(corpus.size());
    detail::parallel_for(corpus.size(), [&](std::size_t i) {
        const auto& cb = corpus[i];
        const int n = cb.body.surface_dim();
        const int base_level = n == 1 ? kSobolevLevel1 : kSobolevLevel2;
        const int res = suite_resolution(cb.body, base_level);
        Body& B = bodies[i];
        B.base.resize(slots);
        B.refined.resize(slots);
        B.reports.resize(slots);
        for (int level = 0; level < 2; ++level) {
            const auto q = surface_quadrature(cb.body, suite_resolution(cb.body, base_level + level));
            const auto h = node_curvatures(cb.body, q, 0.5);
            std::map<double, PairMatrix> pairs;
            for (double sigma : {0.25, 0.5}) {
                pairs.emplace(sigma, PairMatrix(q, sigma));
            }
            const auto fields = test_fields(q, cb.body.centroid(), derive_seed(cb.seed, 4));
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const auto [s, p] = grid[g];
                const Params params = params_for(n, 0.5, s, p);
                const PairMatrix& ps = pairs.at(s);
                const PairMatrix& psp = pairs.at(s * p);
                for (const auto& [label, f] : fields) {
                    const auto u = sample_values(q, f);
                    double ratios[3];
                    if (label == "cap" && p == 1.0) {
                        std::vector<char> mask(q.size());
                        for (std::size_t k = 0; k < q.size(); ++k) {
                            mask[k] = u[k] > 0.5 ? 1 : 0;
                        }
                        const NodeSubset E = make_subset(q, std::move(mask));
                        ratios[0] = set_sobolev_ratio(q, ps, E, params, h);
                        if (level == 0) {
                            auto r = check_set_sobolev(q, ps, E, params, h, 1.0);
                            tag(r, cb, res);
                            B.reports[0 * grid.size() + g].push_back(std::move(r));
                        }
                    }
                    ratios[1] = function_sobolev_ratio(q, psp, u, params, h);
                    const auto sides = level_set_sides(q, psp, u, params, h);
                    ratios[2] = sides.series / sides.bracket;
                    for (int c = 0; c < 3; ++c) {
                        if (c == 0 && (label != "cap" || p != 1.0)) {
                            continue;
                        }
                        auto& v = level == 0 ? B.base : B.refined;
                        v[c * grid.size() + g].push_back(ratios[c]);
                    }
                    if (level == 0) {
                        auto fr = check_function_sobolev(q, psp, u, params, h, 1.0);
                        auto lr = check_level_set_series(q, psp, u, params, h, 1.0);
                        for (auto* r : {&fr, &lr}) {
                            tag(*r, cb, res);
                            r->note = "field: " + label;
                        }
                        B.reports[1 * grid.size() + g].push_back(std::move(fr));
                        B.reports[2 * grid.size() + g].push_back(std::move(lr));
                    }
                }
            }
        }
    });
    for (int n : {1, 2}) {
        for (std::size_t c = 0; c < checks.size(); ++c) {
            for (std::size_t g = 0; g < grid.size(); ++g) {
                FittedGroup group;
                group.check = checks[c];
                group.params = params_for(n, 0.5, grid[g].first, grid[g].second);
                const std::size_t slot = c * grid.size() + g;
                for (std::size_t i = 0; i < corpus.size(); ++i) {
                    if (corpus[i].body.surface_dim() != n) {
                        continue;
                    }
                    Body& B = bodies[i];
                    group.base.insert(group.base.end(), B.base[slot].begin(), B.base[slot].end());
                    group.refined.insert(group.refined.end(), B.refined[slot].begin(), B.refined[slot].end());
                    std::move(B.reports[slot].begin(), B.reports[slot].end(), std::back_inserter(group.reports));
                }
                finish_group(group, out, o.seed);
            }
        }
    }

    // Coarea on circle and sphere meshes: smooth fields and indicators.
    struct Mesh {
        std::string name;
        ConvexBody body;
        int resolution;
    };
    const std::vector<Mesh> meshes {{"circle", disk(1.0), 128}, {"sphere", sphere_ball(1.0), 2}};
    for (std::size_t m = 0; m < meshes.size(); ++m) {
        const auto q = surface_quadrature(meshes[m].body, meshes[m].resolution);
        const PairMatrix pairs(q, 0.5);
        auto reports = collect(12, [&](std::size_t i) {
            const std::uint64_t seed = derive_seed(o.seed, 9000 + 100 * m + i);
            Rng rng(seed);
            const Vec3 e = q.n == 1 ? Vec3(std::cos(rng.uniform(0, 2 * kPi)), 0, 0) : random_direction(rng);
            const Vec3 a = q.n == 1 ? Vec3(e.x(), std::sqrt(std::max(0.0, 1.0 - e.x() * e.x())), 0) : e;
            std::vector<double> u(q.size());
            const bool indicator = i >= 10;
            const double k = 1 + static_cast<int>(i % 3);
            const double shift = rng.uniform(-0.5, 0.5);
            for (std::size_t j = 0; j < q.size(); ++j) {
                const double t = a.dot(q.nodes[j].point);
                u[j] = indicator ? (t > shift ? 1.0 : 0.0) : std::cos(k * t + shift) + 0.3 * t * t;
            }
            auto r = check_coarea(pairs, u, 64, indicator ? 1e-10 : 0.02);
            r.body = numbered(meshes[m].name, static_cast<int>(i));
            r.seed = seed;
            r.resolution = meshes[m].resolution;
            r.note = indicator ? "indicator field" : "smooth field";
            return std::vector<InequalityReport> {r};
        });
        out.insert(out.end(), reports.begin(), reports.end());
    }

    // Slicing sums over random admissible sequences.
    std::vector<Params> sp_grid;
    for (int n : {1, 2}) {
        for (double s : {0.25, 0.5, 0.75}) {
            for (double p : {1.0, 1.5, 2.0}) {
                if (n > s * p) {
                    sp_grid.push_back(params_for(n, 0.5, s, p));
                }
            }
        }
    }
    auto slicing = collect(static_cast<std::size_t>(o.sequences), [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(o.seed, 20000 + i);
        Rng rng(seed);
        SlicingSequence seq;
        seq.head = rng.uniform(0.0, 1.0) < 0.05 ? 0.0 : std::pow(10.0, rng.uniform(-3.0, 3.0));
        seq.first = rng.integer(-8, 8);
        const int len = rng.integer(0, 14);
        double a = seq.head;
        for (int k = 0; k < len; ++k) {
            const double u = rng.uniform();
            a = u < 0.15 ? a : u < 0.25 ? 0.0 : a * rng.uniform(0.0, 1.0);
            seq.window.push_back(a);
        }
        auto reports = check_slicing(seq, sp_grid[i % sp_grid.size()]);
        std::vector<InequalityReport> v;
        for (auto& r : reports) {
            r.body = numbered("sequence", static_cast<int>(i));
            r.seed = seed;
            v.push_back(std::move(r));
        }
        return v;
    });
    out.insert(out.end(), slicing.begin(), slicing.end());

    SlicingSequence worked;
    worked.head = 1.0;
    worked.first = 1;
    for (auto& r : check_slicing(worked, params_for(2, 0.5, 0.5, 1.0))) {
        r.body = "worked-example";
        r.seed = o.seed;
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Appendix: Cauchy's formula, the |cos| integral, Rosenthal-Szasz, isodiametric.

std::vector<InequalityReport> appendix(const SuiteOptions& o)
{
    const auto corpus = both_corpora(o, o.bodies_1d, o.bodies_2d);
    const SphericalRule circle_rule = sphere_rule(1, 720);
    const SphericalRule sphere_rule3 = sphere_rule(2, 3);
    auto out = collect(corpus.size(), [&](std::size_t i) {
        const auto& cb = corpus[i];
        std::vector<InequalityReport> reports {check_rosenthal_szasz(cb.body), check_isodiametric_volume(cb.body)};
        if (cb.body.is_polytope()) {
            reports.push_back(check_cauchy_formula(cb.body, cb.body.surface_dim() == 1 ? circle_rule : sphere_rule3));
        }
        for (auto& r : reports) {
            r.body = cb.name;
            r.seed = cb.seed;
        }
        return reports;
    });
    for (int n : {1, 2}) {
        const SphericalRule& rule = n == 1 ? circle_rule : sphere_rule3;
        for (int k = 0; k < 5; ++k) {
            const std::uint64_t seed = derive_seed(o.seed, 30000 + 10 * n + k);
            Rng rng(seed);
            Vec3 tau = random_direction(rng);
            if (n == 1) {
                tau.z() = 0.0;
                tau.normalize();
            }
            auto r = check_abs_cosine(rule, tau, n == 1 ? 1e-3 : 0.01 * 2.0 * kPi);
            r.body = numbered(n == 1 ? "circle-rule" : "sphere-rule", k);
            r.seed = seed;
            r.resolution = n == 1 ? 720 : 3;
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace

std::uint64_t Rng::next()
{
    return splitmix(state_);
}

double Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
}

int Rng::integer(int lo, int hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next() % span);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    splitmix(state);
    return splitmix(state);
}

std::vector<CorpusBody> make_corpus(int n, int count, std::uint64_t seed)
{
    if (n != 1 && n != 2) {
        throw Error(ErrorCode::ParamError, "corpus dimension must be 1 or 2");
    }
    std::vector<CorpusBody> out;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = derive_seed(seed, 1000 * static_cast<std::uint64_t>(n) + i);
        out.push_back(n == 1 ? planar_body(i, s) : solid_body(i, s));
    }
    return out;
}

int suite_resolution(const ConvexBody& body, int level)
{
    if (level < 0) {
        throw Error(ErrorCode::ParamError, "resolution level must be non-negative");
    }
    const int scale = 1 << level;
    return std::visit(
        [&](const auto& shape) -> int {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Polygon2D>) {
                return 8 * scale;
            } else if constexpr (std::is_same_v<T, Hull3D>) {
                return 2 * scale;
            } else {
                return shape.dim == 2 ? 64 * scale : 2 + level;
            }
        },
        body.shape());
}

int SuiteResult::passed() const
{
    return static_cast<int>(std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.pass; }));
}

int SuiteResult::failed() const
{
    return static_cast<int>(reports.size()) - passed();
}

std::vector<std::string> suite_names()
{
    return {"all", "section2", "section3", "section4", "appendix"};
}

SuiteResult run_suite(std::string_view name, const SuiteOptions& options)
{
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw Error(ErrorCode::ParamError,
            "unknown suite \"" + std::string(name) + "\" (expected all, section2, section3, section4 or appendix)");
    }
    SuiteResult result;
    result.suite = std::string(name);
    result.seed = options.seed;
    const bool all = name == "all";
    auto add = [&](std::vector<InequalityReport> reports) {
        std::move(reports.begin(), reports.end(), std::back_inserter(result.reports));
    };
    if (all || name == "section2") {
        add(section2(options));
    }
    if (all || name == "section3") {
        add(section3(options));
    }
    if (all || name == "section4") {
        add(section4(options));
    }
    if (all || name == "appendix") {
        add(appendix(options));
    }
    std::stable_sort(result.reports.begin(), result.reports.end(), [](const auto& a, const auto& b) {
        return a.name != b.name ? a.name < b.name : a.seed < b.seed;
    });
    return result;
}

void write_suite_report(const SuiteResult& result, std::ostream& out)
{
    for (const auto& r : result.reports) {
        out << report_to_json(r).dump() << '\n';
    }
    std::map<std::string, std::pair<int, int>> per_check;
    for (const auto& r : result.reports) {
        auto& [pass, total] = per_check[r.name];
        pass += r.pass ? 1 : 0;
        ++total;
    }
    for (const auto& [check, counts] : per_check) {
        out << "# " << check << ": " << counts.first << "/" << counts.second << " passed\n";
    }
    out << "# suite " << result.suite << " seed " << result.seed << ": " << result.reports.size() << " checks, "
        << result.passed() << " passed, " << result.failed() << " failed\n";
}

InequalityReport with_constant(InequalityReport r, double c)
{
    const double bracket = r.constant != 0.0 ? r.rhs / r.constant : 0.0;
    r.rhs = c * bracket;
    r.constant = c;
    r.margin = r.rhs - r.lhs;
    r.pass = std::isfinite(r.lhs) && !std::isnan(r.rhs) && r.margin >= -r.tolerance;
    return r;
}

} // namespace fmc
