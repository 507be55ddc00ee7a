#include "fmc/flow.hpp"

#include <doctest.h>

#include <sstream>

using namespace fmc;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double disk_halpha(double alpha)
{
    return std::pow(2.0, -alpha) * std::exp(std::lgamma(0.5 * (1.0 - alpha)) + std::lgamma(0.5) - std::lgamma(1.0 - 0.5 * alpha));
}

// Shrinking circle: R^(1+a) decreases at rate (1+a) c1, so T* = R0^(1+a) / ((1+a) c1).
double circle_extinction(double radius, double alpha)
{
    return std::pow(radius, 1.0 + alpha) / ((1.0 + alpha) * disk_halpha(alpha));
}

FlowOptions quick(int markers = 128)
{
    FlowOptions o;
    o.markers = markers;
    o.cfl = 0.1;
    return o;
}

} // namespace

TEST_CASE("classical curvature of marker polygons")
{
    const FlowState s = make_state(initial_markers(disk(2.0), 256), 0.5);
    const auto kappa = classical_curvature(s);
    double total = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        CHECK(kappa[i] == Approx(0.5).epsilon(0.01));
        const std::size_t p = (i + kappa.size() - 1) % kappa.size();
        const std::size_t q = (i + 1) % kappa.size();
        total += kappa[i] * 0.5 * ((s.markers[i] - s.markers[p]).norm() + (s.markers[q] - s.markers[i]).norm());
    }
    CHECK(total == Approx(2.0 * kPi).epsilon(1e-12));

    const FlowState big = make_state(initial_markers(disk(4.0), 256), 0.5);
    CHECK(classical_curvature(big)[7] == Approx(0.5 * kappa[7]).epsilon(1e-9));
}

TEST_CASE("marker curvature")
{
    for (double alpha : {0.25, 0.5, 0.75}) {
        const auto h = marker_halpha(initial_markers(disk(1.0), 128), alpha);
        for (double v : h) {
            CHECK(v == Approx(disk_halpha(alpha)).epsilon(2e-3));
        }
        const auto h2 = marker_halpha(initial_markers(disk(2.0), 128), alpha);
        CHECK(h2[3] == Approx(std::pow(2.0, -alpha) * h[3]).epsilon(1e-9));
    }

    // Unit square: the marker next to a corner is faster than the edge midpoint.
    const FlowState sq = make_state(initial_markers(rectangle(1.0, 1.0), 128), 0.5);
    CHECK(sq.markers.size() == 128);
    CHECK(sq.halpha[1] > sq.halpha[16]);
    for (double v : sq.halpha) {
        CHECK(v > 0.0);
    }
}

TEST_CASE("single steps")
{
    const FlowState c = make_state(initial_markers(disk(1.0), 128), 0.5);
    const FlowState c1 = fmcf_step(c, 0.5, 0.1);
    CHECK(c1.t > 0.0);
    CHECK(c1.rehulls == 0);
    const double r0 = c1.markers[0].norm();
    for (const auto& m : c1.markers) {
        CHECK(m.norm() == Approx(r0).epsilon(1e-9));
    }
    CHECK(c1.perimeter < c.perimeter);

    const FlowState sq = make_state(initial_markers(rectangle(1.0, 1.0), 128), 0.5);
    const FlowState sq1 = fmcf_step(sq, 0.5, 0.1);
    CHECK_NOTHROW(polygon_from_points(sq1.markers));
    CHECK(sq1.area < sq.area);
    CHECK_THROWS_AS(fmcf_step(sq, 0.5, 0.0), Error);
}

TEST_CASE("circle extinction and scaling")
{
    const double alpha = 0.5;
    const FlowTrace base = fmcf_run(disk(1.0), alpha, quick());
    CHECK(base.termination_reason == "extinct");
    CHECK(base.T_star_num == Approx(circle_extinction(1.0, alpha)).epsilon(0.02));
    CHECK(base.T_star_num == Approx(0.17977).epsilon(0.02));

    for (double lambda : {0.5, 2.0}) {
        const FlowTrace t = fmcf_run(disk(lambda), alpha, quick());
        CHECK(t.T_star_num / base.T_star_num == Approx(std::pow(lambda, 1.0 + alpha)).epsilon(0.03));
    }

    const auto fv = check_first_variation(base, 0.03);
    CHECK(fv.pass);
    // Both sides equal -2 pi c1 R^(-alpha) for the shrinking circle.
    const auto& mid = base.states[base.states.size() / 2];
    const double radius = mid.perimeter / (2.0 * kPi);
    double rate = 0.0;
    for (std::size_t j = 0; j < mid.markers.size(); ++j) {
        rate -= mid.halpha[j] * 2.0 * kPi / mid.markers.size();
    }
    CHECK(rate == Approx(-2.0 * kPi * disk_halpha(alpha) * std::pow(radius, -alpha)).epsilon(0.01));

    const auto decay = check_decay_and_bounds(base);
    CHECK(decay.pass);
    double slope = 0.0;
    for (const auto& [k, v] : decay.extras) {
        if (k == "mean_slope") {
            slope = v;
        }
    }
    CHECK(slope == Approx(-std::pow(2.0 * kPi, 1.0 + alpha) * (1.0 + alpha) * disk_halpha(alpha)).epsilon(0.02));
}

TEST_CASE("polygon runs")
{
    const FlowTrace sq = fmcf_run(rectangle(1.0, 1.0), 0.5, quick());
    for (std::size_t i = 1; i < sq.states.size(); ++i) {
        CHECK(sq.states[i].t > sq.states[i - 1].t);
        CHECK(sq.states[i].perimeter < sq.states[i - 1].perimeter);
        CHECK(sq.states[i].area < sq.states[i - 1].area);
    }
    for (std::size_t i = 0; i < sq.states.size(); i += 50) {
        CHECK_NOTHROW(polygon_from_points(sq.states[i].markers));
    }
    CHECK(check_first_variation(sq).pass);
    const auto dsq = check_decay_and_bounds(sq);
    CHECK(dsq.pass);

    const FlowTrace thin = fmcf_run(rectangle(1.0, 0.05), 0.5, quick());
    const auto dthin = check_decay_and_bounds(thin);
    CHECK(dthin.pass);
    auto extra = [](const InequalityReport& r, const std::string& key) {
        for (const auto& [k, v] : r.extras) {
            if (k == key) {
                return v;
            }
        }
        return std::nan("");
    };
    const double perimeter_drift = std::abs(std::log(extra(dthin, "ratio_perimeter") / extra(dsq, "ratio_perimeter")));
    const double diameter_drift = std::abs(std::log(extra(dthin, "ratio_diameter") / extra(dsq, "ratio_diameter")));
    CHECK(perimeter_drift < diameter_drift);
    CHECK(extra(dthin, "ratio_diameter") < 0.1 * extra(dsq, "ratio_diameter"));
}

TEST_CASE("trace output and errors")
{
    FlowTrace empty;
    CHECK_THROWS_AS(check_first_variation(empty), Error);
    CHECK_THROWS_AS(initial_markers(sphere_ball(1.0), 64), Error);
    CHECK_THROWS_AS(initial_markers(disk(1.0), 4), Error);

    FlowOptions o = quick(64);
    o.max_steps = 5;
    try {
        fmcf_run(disk(1.0), 0.5, o);
        FAIL("expected an abort");
    } catch (const FlowAborted& e) {
        CHECK(e.code() == ErrorCode::MaxStepsExceeded);
        CHECK(e.trace.states.size() >= 2);
    }

    const FlowTrace t = fmcf_run(disk(1.0), 0.5, quick(64));
    std::ostringstream csv;
    write_trace_csv(t, csv);
    CHECK(csv.str().rfind("t,perimeter,area,max_halpha,dt\n", 0) == 0);
    const std::string svg = snapshot_svg(t.states.front(), Eigen::Vector2d::Zero(), 1.2);
    CHECK(svg.find("<polygon") != std::string::npos);
}
