#include "fmc/io.hpp"
#include "fmc/quadrature.hpp"

#include <doctest.h>

using namespace fmc;
using Catch = doctest::Approx;

namespace {

ErrorCode parse_code(const std::string& text)
{
    try {
        parse_body(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::TraceTooShort;
}

} // namespace

TEST_CASE("fixture files match the named fixtures")
{
    for (const auto& name : fixture_names()) {
        CAPTURE(name);
        const auto from_file = load_body(std::string(FMC_FIXTURE_DIR) + "/" + name + ".json");
        const auto named = named_fixture(name);
        CHECK(from_file.surface_dim() == named.surface_dim());
        CHECK(perimeter(from_file) == Catch(perimeter(named)).epsilon(1e-12));
        CHECK(area(from_file) == Catch(area(named)).epsilon(1e-12));
        CHECK(body_to_json(from_file).dump() == body_to_json(named).dump());
    }
}

TEST_CASE("body documents")
{
    const auto tri = parse_body(R"({"type":"polygon","vertices":[[0,0],[2,0],[0,2]]})");
    CHECK(area(tri) == Catch(2.0));

    const auto hull = parse_body(
        R"({"type":"hull3d","vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,1],[1,1,0],[1,0,1],[0,1,1]]})");
    CHECK(area(hull) == Catch(1.0));
    CHECK(perimeter(hull) == Catch(6.0));

    const auto ball = parse_body(R"({"type":"ball","dim":3,"center":[1,2,3],"radius":2})");
    CHECK(area(ball) == Catch(4.0 / 3.0 * std::numbers::pi * 8.0));
    CHECK(body_to_json(ball)["center"].dump() == "[1.0,2.0,3.0]");

    CHECK(parse_code("{") == ErrorCode::ParseError);
    CHECK(parse_code("[]") == ErrorCode::ParseError);
    CHECK(parse_code(R"({"type":"torus"})") == ErrorCode::ParseError);
    CHECK(parse_code(R"({"type":"polygon"})") == ErrorCode::ParseError);
    CHECK(parse_code(R"({"type":"polygon","vertices":[[0,0],[1],[0,1]]})") == ErrorCode::ParseError);
    CHECK(parse_code(R"({"type":"ball","dim":4,"radius":1})") == ErrorCode::ParseError);
    CHECK(parse_code(R"({"type":"hull3d","vertices":[[0,0,0]],"faces":[[0,1]]})") == ErrorCode::ParseError);
    CHECK(parse_code(R"({"type":"polygon","vertices":[[0,0],[2,0],[1,0.2],[2,2],[0,2]]})") == ErrorCode::NonConvex);
    CHECK(parse_code(R"({"type":"ball","dim":2,"radius":-1})") != ErrorCode::TraceTooShort);
    CHECK_THROWS_AS(named_fixture("dodeca"), Error);
}

TEST_CASE("report serialization keeps field order")
{
    auto r = inequality_report("demo", Params {1, 0.5, 0.25, 2.0}, 1.0, 2.0, 1e-9);
    r.extras.emplace_back("zeta", 3.0);
    r.extras.emplace_back("alpha", 4.0);
    const auto j = report_to_json(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) {
        keys.push_back(k);
    }
    CHECK(keys.front() == "name");
    CHECK(j["pass"] == true);
    CHECK(j["margin"].get<double>() == Catch(1.0));
    CHECK(j["extras"].dump() == R"({"zeta":3.0,"alpha":4.0})");
}
