#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fbw/obstacle.hpp"

using namespace fbw;

namespace {

GridSpec box(double h) { return GridSpec::covering(-1, 1, -1, 1, h); }

double sup_error(const ObstacleSolution& s, const Fn2& exact) {
    const GridSpec& g = s.grid;
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) e = std::max(e, std::abs(s.u(i, j) - exact(g.x(i), g.y(j))));
    return e;
}

}  // namespace

TEST_CASE("case tags") {
    CHECK_THROWS_AS(obstacle_case("nope"), InputError);
    CHECK_THROWS_AS(obstacle_case("radial"), InputError);
    CHECK_THROWS_AS(obstacle_case("radial:1.5"), InputError);
    CHECK_THROWS_AS(obstacle_case("strip:x"), InputError);
    CHECK_THROWS_AS(obstacle_case("pinched:0.25"), InputError);
    CHECK_THROWS_AS(obstacle_case("halfspace:1"), InputError);
    CHECK(obstacle_case("sing").analytic);
    CHECK_FALSE(obstacle_case("pinched:0.25,0.45").exact);
}

TEST_CASE("solver on closed forms") {
    auto hs = obstacle_case("halfspace");
    auto s = make_obstacle(box(1.0 / 32), hs);
    CHECK(sup_error(s, hs.exact) < 1e-10);
    CHECK(complementarity_residual(s.u) <= 1e-9);

    auto st = obstacle_case("strip:0.25");
    CHECK(sup_error(make_obstacle(box(1.0 / 32), st), st.exact) < 1e-10);

    auto z = make_obstacle(box(1.0 / 32), obstacle_case("zero"));
    CHECK(z.sweeps == 0);
    for (auto m : z.omega) CHECK(m == 0);
}

TEST_CASE("radial case: second order and the free boundary") {
    auto rc = obstacle_case("radial:0.5");
    auto a = make_obstacle(box(1.0 / 64), rc), b = make_obstacle(box(1.0 / 128), rc);
    CHECK(sup_error(a, rc.exact) / sup_error(b, rc.exact) > 3.5);
    auto ca = conjugate_pair(a), cb = conjugate_pair(b);
    CHECK(ca.identity < 1e-14);
    CHECK(ca.cr_T_sup / cb.cr_T_sup > 3.5);
    CHECK(ca.cr_S_sup / cb.cr_S_sup > 3.5);

    auto f = weierstrass_forms_obstacle(b);
    CHECK(f.report.all_pass());
    REQUIRE(f.periods.size() == 1);
    CHECK(std::abs(f.periods[0].first) < 1e-8);
    CHECK(std::abs(f.periods[0].second) < 1e-8);

    const GridSpec& g = b.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double r = std::hypot(g.x(i), g.y(j));
            if (std::abs(r - 0.5) > 2 * g.h) CHECK((b.omega[g.idx(i, j)] != 0) == (r > 0.5));
        }
}

TEST_CASE("solver failures") {
    ObstacleOptions o;
    o.max_sweeps = 10;
    CHECK_THROWS_AS(solve_obstacle(box(1.0 / 32), obstacle_case("halfspace").data, o), ConvergenceError);
    CHECK_THROWS_AS(solve_obstacle(box(1.0 / 32), [](double, double) { return -1.0; }), InputError);
    CHECK_THROWS_AS(assemble_obstacle(box(1.0 / 32), [](double, double) { return -1.0; }), InputError);
}

TEST_CASE("disk and rectangle areas") {
    const double pi = std::numbers::pi;
    CHECK(disk_rect_area(0.3, -0.2, 0.7, -5, 5, -5, 5) == doctest::Approx(pi * 0.49).epsilon(1e-14));
    CHECK(disk_rect_area(0, 0, 1, 0, 1, 0, 1) == doctest::Approx(pi / 4).epsilon(1e-14));
    CHECK(disk_rect_area(0, 0, 1, 0.1, 0.2, -0.3, -0.2) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(disk_rect_area(0, 0, 1, 2, 3, 2, 3) == 0.0);
    // a split along arbitrary lines adds up
    double total = 0.0;
    for (double x : {-2.0, -0.31, 0.42})
        for (double y : {-2.0, 0.17, 0.9}) {
            const double x1 = x == -2.0 ? -0.31 : (x == -0.31 ? 0.42 : 2.0);
            const double y1 = y == -2.0 ? 0.17 : (y == 0.17 ? 0.9 : 2.0);
            total += disk_rect_area(0.05, 0.1, 0.8, x, x1, y, y1);
        }
    CHECK(total == doctest::Approx(pi * 0.64).epsilon(1e-13));
}

TEST_CASE("stratification") {
    const double h = 1.0 / 64;
    auto hs = make_obstacle(box(h), obstacle_case("halfspace"));
    auto st = stratify_boundary(hs);
    CHECK(st.reg > 0);
    CHECK(st.sing == 0);
    CHECK(st.unresolved == 0);
    for (const auto& b : st.samples)
        if (b.label == Density::Reg) {
            CHECK(b.theta == doctest::Approx(0.5).epsilon(1e-4));
            CHECK(b.normal.y == doctest::Approx(1.0));
        }
    CHECK(st.graphs.interior_mismatch == 0);
    auto bc = boundary_condition_check(hs, st);
    CHECK(bc.sup("boundary_condition_e2") < 1e-8);
    CHECK(branching_points_obstacle(hs, st).points.empty());

    auto sg = make_obstacle(box(h), obstacle_case("sing"));
    auto ss = stratify_boundary(sg);
    CHECK(ss.sing > 0);
    CHECK(ss.reg == 0);
    for (const auto& b : ss.samples)
        if (b.label == Density::Sing) CHECK(b.theta == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(boundary_condition_check(sg, ss).warnings().size() == 1);

    auto strip = make_obstacle(box(h), obstacle_case("strip:0.25"));
    auto sst = stratify_boundary(strip);
    CHECK(branching_points_obstacle(strip, sst).points.empty());
    CHECK(sst.graphs.eta_plus[64] == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(sst.graphs.eta_minus[64] == doctest::Approx(-0.25).epsilon(1e-8));
}

TEST_CASE("pinched contact branches twice") {
    std::vector<double> first;
    for (double h : {1.0 / 64, 1.0 / 128}) {
        auto s = make_obstacle(box(h), obstacle_case("pinched:0.25,0.45"));
        auto st = stratify_boundary(s);
        auto b = branching_points_obstacle(s, st);
        REQUIRE(b.points.size() == 2);
        CHECK(b.points[0] == doctest::Approx(-b.points[1]));
        if (first.empty())
            first = b.points;
        else
            CHECK(std::abs(first[1] - b.points[1]) <= 4 * h);
    }
}

TEST_CASE("stratum angle and rotation") {
    auto s = make_obstacle(box(1.0 / 32), obstacle_case("halfspace"));
    CHECK(first_stratum_angle(s) == doctest::Approx(0.0).epsilon(1e-12));
    auto r = rotate_obstacle(s, 0.3);
    CHECK(first_stratum_angle(r) == doctest::Approx(0.3).epsilon(1e-2));
}

TEST_CASE("membrane over the strip") {
    auto s = make_obstacle(box(1.0 / 32), obstacle_case("strip:0.25"));
    auto m = obstacle_membrane(s, derivative_graphs(s));
    CHECK(m.report.all_pass());
    CHECK(m.state.flagged == 0);
    // w+ = t - y_src with y_src = t + 1/4
    const auto& w = m.state.w_plus;
    for (int j = m.first_row; j < w.grid.ny; ++j) CHECK(w(3, j) == doctest::Approx(-0.25).epsilon(1e-8));
}

TEST_CASE("membrane over the singular case") {
    auto s = make_obstacle(box(1.0 / 32), obstacle_case("sing"));
    auto m = obstacle_membrane(s, derivative_graphs(s));
    CHECK(m.report.all_pass());
    CHECK(m.report.sup("complementarity") < 1e-10);
    CHECK(m.report.sup("ordering") == 0.0);
}
