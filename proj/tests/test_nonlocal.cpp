#include "fmc/nonlocal.hpp"

#include <doctest.h>

using namespace fmc;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double beta(double a, double b)
{
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Chord integral of the unit circle: integral over (0, pi) of (2 sin t)^(-alpha).
double disk_halpha(double alpha)
{
    return std::pow(2.0, -alpha) * beta(0.5 * (1.0 - alpha), 0.5);
}

// Chord integral of the unit sphere: 2 pi integral_0^{pi/2} (2 sin t)^(-alpha) cos t dt.
double sphere_halpha(double alpha)
{
    return 2.0 * kPi * std::pow(2.0, -alpha) / (1.0 - alpha);
}

// Dense midpoint sum on (0, 2 pi) for integrands in the circle's arc distance.
template <class F>
double circle_integral(const F& f, int m = 400000)
{
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        total += f((k + 0.5) * 2.0 * kPi / m);
    }
    return total * 2.0 * kPi / m;
}

NodeSubset upper_half(const SurfaceQuadrature& q)
{
    std::vector<char> mask(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        mask[i] = q.nodes[i].point.y() > 0 ? 1 : 0;
    }
    return make_subset(q, mask);
}

} // namespace

TEST_CASE("chord formula on balls")
{
    const auto d = disk();
    const auto x = locate(d, Vec3(1, 0, 0));
    CHECK(halpha_chord(d, x, 0.5).value == Approx(3.7081).epsilon(5e-3));
    for (double a : {0.25, 0.5, 0.75}) {
        CHECK(halpha_chord(d, x, a).value == Approx(disk_halpha(a)).epsilon(1e-3));
        const auto d2 = disk(2.0);
        CHECK(halpha_chord(d2, locate(d2, Vec3(0, 2, 0)), a).value
            == Approx(std::pow(2.0, -a) * disk_halpha(a)).epsilon(1e-3));
    }
    const auto b = sphere_ball();
    const auto z = locate(b, Vec3(1, -2, 0.5));
    for (double a : {0.25, 0.5, 0.75}) {
        CHECK(halpha_chord(b, z, a).value == Approx(sphere_halpha(a)).epsilon(2e-3));
    }
    const auto v = halpha_chord(d, x, 0.5);
    CHECK(v.estimated_error < 1e-2);
    CHECK(v.method == CurvatureMethod::Chord);
    CHECK_THROWS_AS(halpha_chord(d, x, 0.5, graded_half_rule(1, Vec3(0, 1, 0), 0.5)), Error);
}

TEST_CASE("chord formula on polytopes")
{
    // Slab limit: a very long rectangle looks like a strip of width 1.
    const auto r1 = rectangle(100, 1);
    const auto r2 = rectangle(10000, 1);
    const double h1 = halpha_chord(r1, locate(r1, Vec3(50, 0, 0)), 0.5).value;
    const double h2 = halpha_chord(r2, locate(r2, Vec3(5000, 0, 0)), 0.5).value;
    CHECK(h1 == Approx(h2).epsilon(0.02));

    // Nested boxes share the bottom face point; the larger body has smaller H.
    const auto small = box(1, 1, 1);
    const auto large = box(2, 2, 3);
    const Vec3 p(0.5, 0.5, 0.0);
    CHECK(halpha_chord(large, locate(large, p), 0.5).value < halpha_chord(small, locate(small, p), 0.5).value);

    // Points on or near a facet boundary.
    const auto sq = rectangle(1, 1);
    CHECK_THROWS_AS(halpha_chord(sq, locate(sq, Vec3(0, 0, 0)), 0.5), Error);
    auto near = locate(sq, Vec3(1e-10, 0, 0));
    CHECK(halpha_chord(sq, near, 0.5).overflow);

    // Homogeneity of degree -alpha.
    const auto ico = icosahedron();
    const auto q = surface_quadrature(ico, 2);
    const auto xi = surface_point(q, 3);
    const double h = halpha_chord(ico, xi, 0.4).value;
    for (double lambda : {0.5, 2.0}) {
        const auto big = scaled(ico, lambda);
        CHECK(halpha_chord(big, locate(big, lambda * xi.point), 0.4).value
            == Approx(std::pow(lambda, -0.4) * h).epsilon(1e-6));
    }
}

TEST_CASE("boundary formula agrees with the chord formula")
{
    const auto d = disk();
    const auto qd = surface_quadrature(d, 256);
    const auto x = locate(d, Vec3(0.6, 0.8, 0));
    const auto hb = halpha_boundary(d, x, 0.5, qd);
    CHECK(hb.method == CurvatureMethod::Boundary);
    CHECK(hb.value == Approx(disk_halpha(0.5)).epsilon(1e-2));
    CHECK(halpha_boundary(d, surface_point(qd, 7), 0.5, qd).value == Approx(disk_halpha(0.5)).epsilon(1e-2));

    const auto sq = rectangle(1, 1);
    const auto qs = surface_quadrature(sq, 16);
    const auto m = locate(sq, Vec3(0.5, 0, 0));
    CHECK(halpha_boundary(sq, m, 0.5, qs).value == Approx(halpha_chord(sq, m, 0.5).value).epsilon(1e-2));
    const auto off = locate(sq, Vec3(1, 0.1, 0));
    CHECK(halpha_boundary(sq, off, 0.3, qs).value == Approx(halpha_chord(sq, off, 0.3).value).epsilon(1e-2));

    // The two-dimensional pairing: sphere and icosahedron.
    const auto b = sphere_ball();
    const auto qb = surface_quadrature(b, 3);
    CHECK(halpha_boundary(b, surface_point(qb, 11), 0.5, qb).value == Approx(sphere_halpha(0.5)).epsilon(1e-2));
    const auto ico = icosahedron();
    const auto qi = surface_quadrature(ico, 2);
    for (int i : {0, 1, 2}) {
        const auto xi = surface_point(qi, i);
        CHECK(halpha_boundary(ico, xi, 0.5, qi).value == Approx(halpha_chord(ico, xi, 0.5).value).epsilon(1e-2));
    }
    const auto bx = box(1, 2, 0.5);
    const auto qx = surface_quadrature(bx, 4);
    const auto xb = locate(bx, Vec3(0.3, 0.7, 0.5));
    CHECK(halpha_boundary(bx, xb, 0.6, qx).value == Approx(halpha_chord(bx, xb, 0.6).value).epsilon(1e-2));

    // Points taken from a coarser rule sit on cell endpoints of the finer one;
    // their node index refers to the coarse rule.
    const auto coarse = surface_quadrature(d, 64);
    const auto fine = surface_quadrature(d, 512);
    for (int i : {0, 5, 21, 40}) {
        CHECK(halpha_boundary(d, surface_point(coarse, i), 0.5, fine).value
            == Approx(disk_halpha(0.5)).epsilon(1e-2));
    }
    const auto coarse_b = surface_quadrature(b, 2);
    CHECK(halpha_boundary(b, surface_point(coarse_b, 17), 0.5, qb).value == Approx(sphere_halpha(0.5)).epsilon(1e-2));
}

TEST_CASE("double layer")
{
    const auto sq = rectangle(1, 1);
    const auto qs = surface_quadrature(sq, 16);
    const auto m = locate(sq, Vec3(0.3, 1, 0));
    CHECK(double_layer(qs, m) == Approx(kPi).epsilon(1e-2));
    const auto d = disk();
    CHECK(double_layer(surface_quadrature(d, 512), locate(d, Vec3(0, -1, 0))) == Approx(kPi).epsilon(1e-3));
    const auto ico = icosahedron();
    const auto qi = surface_quadrature(ico, 2);
    CHECK(double_layer(qi, surface_point(qi, 4)) == Approx(2 * kPi).epsilon(2e-2));
    const auto qb = surface_quadrature(sphere_ball(), 3);
    CHECK(double_layer(qb, surface_point(qb, 0)) == Approx(2 * kPi).epsilon(2e-2));

    const auto E = upper_half(qs);
    CHECK(double_layer(qs, m, Restriction::nodes(E)) <= double_layer(qs, m) + 1e-12);
    CHECK(double_layer(qs, m, Restriction::ball(10.0)) == Approx(double_layer(qs, m)));
    std::vector<char> none(qs.size(), 0);
    CHECK(double_layer(qs, m, Restriction::nodes(make_subset(qs, none))) == 0.0);
}

TEST_CASE("fractional perimeter and semi-norms on the circle")
{
    const double s = 0.5;
    const auto d = disk();
    const auto q = surface_quadrature(d, 128);
    const auto E = upper_half(q);
    // Upper half of the unit circle: arc distance delta between points of E and
    // its complement has multiplicity pi - |delta - pi|.
    const double oracle = circle_integral(
        [&](double t) { return (kPi - std::abs(t - kPi)) * std::pow(2 * std::sin(t / 2), -1 - s); });
    const double per = frac_perimeter(q, E, s);
    CHECK(per == Approx(oracle).epsilon(2e-2));
    CHECK(frac_perimeter(q, complement(q, E), s) == Approx(per).epsilon(1e-12));
    std::vector<char> none(q.size(), 0);
    CHECK(frac_perimeter(q, make_subset(q, none), s) == 0.0);

    CHECK(gagliardo(indicator_field(q, E), s, 1.0) == Approx(2.0 * per).epsilon(1e-10));
    CHECK(gagliardo(make_field(q, std::vector<double>(q.size(), 3.0)), s, 2.0) == 0.0);

    // u = cos(theta): |u(a) - u(b)| = 2 |sin((a+b)/2)| |sin((a-b)/2)|.
    const auto u = sample_field(q, [](const Vec3& y) { return y.x(); });
    CHECK(gagliardo(u, s, 1.0) == Approx(8.0 * std::pow(2.0, -s) * beta(0.5 * (1 - s), 0.5)).epsilon(2e-2));

    const PairMatrix pairs(q, s);
    CHECK(frac_perimeter(pairs, E) == Approx(per).epsilon(1e-12));
    CHECK(gagliardo(pairs, indicator_field(q, E).values, 1.0) == Approx(2.0 * per).epsilon(1e-12));
    CHECK_THROWS_AS(make_field(q, {1.0, 2.0}), Error);
}

TEST_CASE("tail integral")
{
    const auto d = disk();
    const auto q = surface_quadrature(d, 256);
    const auto x = surface_point(q, 0);
    CHECK(tail_integral(q, x, full_subset(q), 0.5) == 0.0);
    // Arc of length pi centered at x.
    const auto E = ball_subset(q, x.point, std::sqrt(2.0));
    CHECK(E.measure == Approx(kPi).epsilon(1e-12));
    const double oracle = circle_integral([](double t) {
        return std::abs(t - kPi) < 0.5 * kPi ? std::pow(2 * std::sin(t / 2), -1.5) : 0.0;
    });
    CHECK(tail_integral(q, x, E, 0.5) == Approx(oracle).epsilon(2e-2));
    std::vector<char> mask(q.size(), 0);
    mask[5] = 1;
    CHECK_THROWS_AS(tail_integral(q, x, make_subset(q, mask), 0.5), Error);
}
