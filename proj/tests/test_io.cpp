#include <filesystem>
#include <regex>

#include "doctest.h"
#include "fbw/io.hpp"

using namespace fbw;

TEST_CASE("3x3 field to CSV and back") {
    GridSpec g{-1.0, -0.5, 0.5, 3, 3};
    auto f = ScalarField::sample(g, [](double x, double y) { return x + 10 * y + 0.1; });
    f.mask[g.idx(1, 1)] = 0;
    const std::string csv = field_to_csv(f);
    const auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 4);  // header + 3 rows
    CHECK(rows[0] == std::vector<std::string>{"nx=3", "ny=3", "h=0.5", "origin=-1 -0.5"});
    CHECK(rows[2][1].empty());
    CHECK(rows[1][0] == "-5.9");
    const ScalarField back = field_from_csv(csv);
    CHECK(back.grid == g);
    CHECK(back.mask == f.mask);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (f.mask[k]) CHECK(back.values[k] == f.values[k]);
}

TEST_CASE("RFC-4180 parsing") {
    const auto r = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n\"x\ny\",,z\n");
    REQUIRE(r.size() == 2);
    CHECK(r[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(r[1] == std::vector<std::string>{"x\ny", "", "z"});
    CHECK_THROWS_AS(parse_csv("\"open"), InputError);
}

TEST_CASE("malformed field CSV") {
    CHECK_THROWS_AS(field_from_csv(""), InputError);
    CHECK_THROWS_AS(field_from_csv("nx=2,ny=1,h=1,origin=0 0\r\n1\r\n"), InputError);
    CHECK_THROWS_AS(field_from_csv("nx=2,ny=2,h=1,origin=0 0\r\n1,2\r\n"), InputError);
    CHECK_THROWS_AS(field_from_csv("nx=2,ny=1,h=1,origin=0 0\r\n1,zz\r\n"), InputError);
}

TEST_CASE("round-trip doubles") {
    for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, 0.0})
        CHECK(std::stod(fmt_double(v)) == v);
    CHECK(fmt_double(0.5) == "0.5");
}

TEST_CASE("branching set JSON") {
    BranchingSet b;
    b.points = {-0.5, 0.5};
    b.tol = 0.03125;
    b.h = 0.0078125;
    CHECK(branching_json(b).dump() == R"({"points":[-0.5,0.5],"tol":0.03125,"h":0.0078125})");
}

TEST_CASE("SVG polylines") {
    Polyline l;
    for (int k = 0; k <= 10; ++k) l.pts.push_back({0.1 * k, 0.2 * k});
    const std::string s = svg_polylines({l}, -1, 1, -1, 2);
    CHECK(s.find("viewBox=\"-1 -2 2 3\"") != std::string::npos);
    const std::regex pts("points=\"([^\"]*)\"");
    std::smatch m;
    REQUIRE(std::regex_search(s, m, pts));
    const std::string p = m[1];
    CHECK(std::count(p.begin(), p.end(), ' ') + 1 == 11);
    for (const char* tag : {"<rect", "<path", "<circle", "<text"}) CHECK(s.find(tag) == std::string::npos);
    CHECK_THROWS_AS(svg_polylines({l}, 1, 1, 0, 1), InputError);
}

TEST_CASE("content hash is the git blob hash") {
    CHECK(content_hash("hello") == "b6fc4c620b67d95f953a5c1c1230aaab5db5a1b0");
    CHECK(content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("file write and read") {
    const auto dir = std::filesystem::temp_directory_path() / "fbw_test_io";
    std::filesystem::remove_all(dir);
    const std::string p = (dir / "a" / "b.txt").string();
    write_file(p, "x,y\r\n");
    CHECK(read_file(p) == "x,y\r\n");
    CHECK_FALSE(std::filesystem::exists(p + ".tmp"));
    CHECK_THROWS_AS(read_file((dir / "missing").string()), InputError);
    std::filesystem::remove_all(dir);
}
