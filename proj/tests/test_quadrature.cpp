#include "fmc/quadrature.hpp"

#include <doctest.h>

using namespace fmc;
using doctest::Approx;

namespace {

double sum(const std::vector<double>& xs)
{
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s;
}

double beta(double a, double b)
{
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Integral of sin(theta)^(-alpha) over (0, pi), theta measured from the tangent.
double singular_test(const GradedHalfRule& rule)
{
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        s += rule.weights[i] * std::pow(-rule.directions[i].dot(rule.nu), -rule.alpha);
    }
    return s;
}

} // namespace

TEST_CASE("sphere rules")
{
    const auto c = sphere_rule(1, 360);
    CHECK(sum(c.weights) == Approx(2.0 * std::numbers::pi).epsilon(1e-14));
    const auto s = sphere_rule(2, 4);
    CHECK(s.size() == 5120);
    CHECK(sum(s.weights) == Approx(4.0 * std::numbers::pi).epsilon(1e-12));
    for (const auto* rule : {&c, &s}) {
        Vec3 first = Vec3::Zero();
        for (std::size_t i = 0; i < rule->size(); ++i) {
            first += rule->weights[i] * rule->directions[i];
        }
        CHECK(first.norm() < 1e-10);
    }
    CHECK_THROWS_AS(sphere_rule(1, 4), Error);

    // The integral of |<sigma,tau>| is 2 |B^n|.
    CHECK(abs_cosine_integral(sphere_rule(1, 720), Vec3(0.6, 0.8, 0)) == Approx(4.0).epsilon(1e-3));
    const Vec3 tau = Vec3(1, 2, 3).normalized();
    CHECK(abs_cosine_integral(s, tau) == Approx(2.0 * std::numbers::pi).epsilon(1e-2));
    CHECK(abs_cosine_integral(s, tau) == Approx(abs_cosine_integral(s, Vec3::UnitZ())).epsilon(2e-3));
}

TEST_CASE("graded half rules")
{
    const Vec3 nu(0.6, -0.8, 0.0);
    for (double alpha : {0.25, 0.5, 0.75}) {
        const auto r = graded_half_rule(1, nu, alpha);
        CHECK(sum(r.weights) == Approx(std::numbers::pi).epsilon(1e-12));
        CHECK(sum(r.coarse_weights) == Approx(std::numbers::pi).epsilon(1e-12));
        for (const auto& d : r.directions) {
            CHECK(d.dot(nu) < 0.0);
        }
        CHECK(singular_test(r) == Approx(beta(0.5 * (1 - alpha), 0.5)).epsilon(5e-3));
    }
    const double exact = std::tgamma(0.25) * std::tgamma(0.5) / std::tgamma(0.75);
    CHECK(singular_test(graded_half_rule(1, nu, 0.5)) == Approx(exact).epsilon(2e-3));
    const double e1 = std::abs(singular_test(graded_half_rule(1, nu, 0.5, 40)) - exact);
    const double e2 = std::abs(singular_test(graded_half_rule(1, nu, 0.5, 80)) - exact);
    CHECK(e2 * 2.0 <= e1);

    for (const Vec3& n2 : {Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(1.0 / 3, 2.0 / 3, 2.0 / 3)}) {
        const auto r = graded_half_rule(2, n2, 0.5, 24);
        CHECK(sum(r.weights) == Approx(2.0 * std::numbers::pi).epsilon(1e-12));
        for (const auto& d : r.directions) {
            CHECK(d.dot(n2) < 0.0);
            CHECK(d.norm() == Approx(1.0));
        }
        // Integral of (sin theta)^(-alpha) over the half sphere, theta from the tangent
        // plane: 2 pi * integral_0^{pi/2} sin^(-a) cos = 2 pi / (1 - a).
        CHECK(singular_test(r) == Approx(4.0 * std::numbers::pi).epsilon(5e-3));
    }
}
