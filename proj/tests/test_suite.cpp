#include "fmc/suite.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace fmc;

TEST_CASE("seeded generator and corpus")
{
    Rng a(42);
    Rng b(42);
    for (int k = 0; k < 100; ++k) {
        CHECK(a.next() == b.next());
    }
    Rng c(7);
    for (int k = 0; k < 1000; ++k) {
        const double u = c.uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
        const int i = c.integer(3, 5);
        CHECK(i >= 3);
        CHECK(i <= 5);
    }
    CHECK(derive_seed(0, 1) != derive_seed(0, 2));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));

    const auto first = make_corpus(2, 8, 5);
    const auto again = make_corpus(2, 8, 5);
    REQUIRE(first.size() == 8);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].name == again[i].name);
        CHECK(first[i].body.surface_dim() == 2);
        CHECK(perimeter(first[i].body) == perimeter(again[i].body));
    }
    CHECK(make_corpus(1, 4, 5)[0].body.surface_dim() == 1);
}

TEST_CASE("suite runs are sorted, reproducible and seed dependent")
{
    SuiteOptions o;
    o.seed = 3;
    o.bodies_1d = 6;
    o.bodies_2d = 4;
    const auto r1 = run_suite("appendix", o);
    const auto r2 = run_suite("appendix", o);
    REQUIRE(!r1.reports.empty());
    CHECK(r1.failed() == 0);
    CHECK(r1.passed() == static_cast<int>(r1.reports.size()));
    CHECK(std::is_sorted(r1.reports.begin(), r1.reports.end(), [](const auto& a, const auto& b) {
        return a.name != b.name ? a.name < b.name : a.seed < b.seed;
    }));

    std::ostringstream s1, s2;
    write_suite_report(r1, s1);
    write_suite_report(r2, s2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("# suite appendix seed 3: ") != std::string::npos);

    o.seed = 4;
    std::ostringstream s3;
    write_suite_report(run_suite("appendix", o), s3);
    CHECK(s3.str() != s1.str());

    CHECK_THROWS_AS(run_suite("section9"), Error);
}

TEST_CASE("fitted constants rescale reports")
{
    Params p;
    auto r = inequality_report("x", p, 3.0, 2.0, 0.0);
    CHECK(!r.pass);
    const auto scaled = with_constant(r, 2.0);
    CHECK(scaled.constant == 2.0);
    CHECK(scaled.rhs == doctest::Approx(4.0));
    CHECK(scaled.pass);
}
