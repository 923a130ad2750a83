#include "doctest.h"
#include "fbw/config.hpp"
#include "fbw/grid.hpp"

using namespace fbw;

TEST_CASE("flat key-value config") {
    const RunConfig c = parse_config(
        "# comment\n"
        "pipeline = counterexample\n"
        "h = 1/256   # trailing comment\n"
        "K = [-0.6,-0.2],[0.2,0.6]\n"
        "tol.capillary.transmission = 1e-3\n"
        "formats = json, csv\n");
    CHECK(c.pipeline == "counterexample");
    CHECK(c.h == 1.0 / 256);
    CHECK(c.tolerances.at("capillary.transmission") == 1e-3);
    CHECK(c.formats == std::vector<std::string>{"json", "csv"});
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("h 0.1\n"), InputError);
    CHECK_THROWS_AS(parse_config("colour = red\n"), InputError);
    CHECK_THROWS_AS(parse_config("h = 0.1\nh = 0.2\n"), InputError);
    CHECK_THROWS_AS(parse_config("h = 1/0\n"), InputError);
    CHECK_THROWS_AS(parse_config("h = abc\n"), InputError);
    RunConfig c;
    c.pipeline = "nope";
    CHECK_THROWS_AS(validate(c), InputError);
    c = RunConfig{};
    c.h = -1;
    CHECK_THROWS_AS(validate(c), InputError);
    c = RunConfig{};
    c.lambda_minus = 0;
    CHECK_THROWS_AS(validate(c), InputError);
    c = RunConfig{};
    c.formats = {"pdf"};
    CHECK_THROWS_AS(validate(c), InputError);
    c = RunConfig{};
    c.tolerances["x"] = 0;
    CHECK_THROWS_AS(validate(c), InputError);
}

TEST_CASE("interval parsing") {
    CHECK(parse_intervals("[-0.5,0.5]") == std::vector<std::pair<double, double>>{{-0.5, 0.5}});
    CHECK(parse_intervals("{0}") == std::vector<std::pair<double, double>>{{0.0, 0.0}});
    CHECK(parse_intervals(" [-0.6, -0.2], [0.2, 0.6] ").size() == 2);
    CHECK_THROWS_AS(parse_intervals("[0.5,0.2]"), InputError);
    CHECK_THROWS_AS(parse_intervals("[-0.5,0.2],[0.1,0.6]"), InputError);
    CHECK_THROWS_AS(parse_intervals("[0.2,0.6],[-0.6,-0.2]"), InputError);
    CHECK_THROWS_AS(parse_intervals("[0.1]"), InputError);
    CHECK_THROWS_AS(parse_intervals(""), InputError);
    CHECK_THROWS_AS(parse_intervals("(0,1)"), InputError);
}

TEST_CASE("canonical text ignores output settings") {
    RunConfig a, b;
    b.out = "elsewhere";
    b.formats = {"svg"};
    CHECK(canonical(a) == canonical(b));
    b.h = 1.0 / 64;
    CHECK(canonical(a) != canonical(b));
    // canonical text parses back to the same canonical text
    CHECK(canonical(parse_config(canonical(b))) == canonical(b));
}
