#include "doctest.h"

#include <cmath>

#include "fbw/bernoulli.hpp"

using namespace fbw;

namespace {
GridSpec box(double h) { return GridSpec::covering(-1, 1, -1, 1, h); }

TwoPhaseSolution wedge(double a, double h) {
    auto ep = [a](double x) { return std::max(0.0, std::abs(x) - a); };
    auto em = [a](double x) { return -std::max(0.0, std::abs(x) - a); };
    return assemble_from_graphs(box(h), ep, em, 1.0, 1.0, [](double, double y) { return y; });
}
}  // namespace

TEST_CASE("two-plane model values") {
    auto s = make_two_plane(1, 1, box(1.0 / 16));
    for (int j = 0; j < s.u.grid.ny; ++j) CHECK(s.u(8, j) == s.u.grid.y(j));
    auto t = make_two_plane(4, 1, box(1.0 / 16));
    CHECK(t.lambda() == 2.0);
    const int i0 = 16, top = t.u.grid.ny - 1;
    CHECK(t.u.grid.x(i0) == 0.0);
    CHECK(t.u(i0, top) == 2.0);
    CHECK(t.u(i0, 0) == -1.0);
    CHECK(t.flatness == 0.0);
    CHECK_THROWS_AS(make_two_plane(0, 1, box(0.5)), InputError);
}

TEST_CASE("two-plane residuals vanish over a log grid of constants") {
    const double vals[] = {1e-2, 1e-1, 1.0, 10.0, 1e2};
    for (double lp : vals)
        for (double lm : vals) {
            auto s = make_two_plane(lp, lm, box(1.0 / 16));
            TwoPhaseCheckOptions o;
            o.analytic = true;
            auto rep = residuals_two_phase(s, o);
            CHECK(rep.checks().size() == 9);
            for (const auto& c : rep.checks()) CHECK(c.sup == 0.0);
            o.analytic = false;
            auto grid = residuals_two_phase(s, o);
            for (const auto& c : grid.checks()) CHECK(c.sup <= 1e-10 * std::max(1.0, lp + lm));
            CHECK(rep.at("jump").samples == s.u.grid.nx);
        }
}

TEST_CASE("jump residual is affine in the reference constant") {
    auto s = make_two_plane(4, 1, box(1.0 / 16));
    TwoPhaseCheckOptions o;
    o.analytic = true;
    o.ref_lambda_minus = 1.0 + 0.125;
    auto rep = residuals_two_phase(s, o);
    CHECK(rep.sup("jump") == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(rep.sup("one_phase_plus") == 0.0);
}

TEST_CASE("assembled flat graphs reproduce the two-plane model") {
    const double lp = 4, lm = 1;
    auto outer = [&](double, double y) { return y >= 0 ? std::sqrt(lp) * y : std::sqrt(lm) * y; };
    auto s = assemble_from_graphs(box(1.0 / 16), [](double) { return 0.0; }, [](double) { return 0.0; }, lp, lm,
                                  outer);
    auto m = make_two_plane(lp, lm, box(1.0 / 16));
    double worst = 0;
    for (std::size_t k = 0; k < s.u.values.size(); ++k) worst = std::max(worst, std::abs(s.u.values[k] - m.u.values[k]));
    CHECK(worst <= 1e-9);
    CHECK(s.flatness <= 1e-9);
    CHECK(s.plus == m.plus);
    CHECK(s.minus == m.minus);
}

TEST_CASE("assemble rejects crossing graphs and wrong-sign data") {
    auto g = box(1.0 / 8);
    auto ep = [](double x) { return std::abs(x - 0.25) < 1e-12 ? -0.1 : 0.0; };
    CHECK_THROWS_AS(assemble_from_graphs(g, ep, [](double) { return 0.0; }, 1, 1, [](double, double y) { return y; }),
                    InputError);
    CHECK_THROWS_AS(assemble_from_graphs(g, [](double) { return 0.0; }, [](double) { return 0.0; }, 1, 1,
                                         [](double, double y) { return -y; }),
                    InputError);
}

TEST_CASE("wedge gap: contact on |x| <= a and two branching points") {
    const double a = 0.3, h = 1.0 / 32;
    auto s = wedge(a, h);
    const GridSpec& g = s.u.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j), e = std::max(0.0, std::abs(x) - a);
            if (std::abs(y) < e) CHECK(s.u(i, j) == 0.0);
            if (y > e) CHECK(s.u(i, j) > 0.0);
            if (y < -e) CHECK(s.u(i, j) < 0.0);
        }
    auto b = branching_set(s, 4 * h);
    REQUIRE(b.points.size() == 2);
    CHECK(std::abs(b.points[0] + a) <= h);
    CHECK(std::abs(b.points[1] - a) <= h);
    auto b2 = branching_set(s, 8 * h);
    REQUIRE(b2.points.size() == 2);
    CHECK(b2.points[0] == doctest::Approx(b.points[0]).epsilon(1e-12));
    CHECK(b2.points[1] == doctest::Approx(b.points[1]).epsilon(1e-12));
    auto rep = residuals_two_phase(s);
    CHECK(rep.checks().size() == 9);
    CHECK(rep.sup("laplace_plus") <= 1e-6);
}

TEST_CASE("branching set edge cases") {
    auto s = make_two_plane(1, 1, box(1.0 / 16));
    CHECK(branching_set(s, 4.0 / 16).points.empty());
    CHECK_THROWS_AS(branching_set(s, -1.0), InputError);

    std::vector<double> xs, gap;
    for (int i = 0; i <= 32; ++i) xs.push_back(-1 + i / 16.0);
    for (double x : xs) gap.push_back(1.0 + x * x);
    CHECK(locate_transitions(xs, gap, 0.1, 1.0 / 16).empty());

    // isolated contact point
    gap.clear();
    for (double x : xs) gap.push_back(std::abs(x));
    auto p = locate_transitions(xs, gap, 0.0, 1.0 / 16);
    REQUIRE(p.size() == 1);
    CHECK(p[0] == 0.0);
}

TEST_CASE("branching set commutes with reflection") {
    const double h = 1.0 / 32;
    auto gp = [](double x) { return std::max(0.0, x - 0.2) + 0.5 * std::max(0.0, -x - 0.5); };
    auto gr = [&](double x) { return gp(-x); };
    auto zero = [](double) { return 0.0; };
    auto neg = [](const auto& f) { return [f](double x) { return -f(x); }; };
    auto s = assemble_from_graphs(box(h), gp, neg(gp), 1, 1, [](double, double y) { return y; });
    auto r = assemble_from_graphs(box(h), gr, neg(gr), 1, 1, [](double, double y) { return y; });
    (void)zero;
    auto bs = branching_set(s, 4 * h), br = branching_set(r, 4 * h);
    REQUIRE(bs.points.size() == 2);
    REQUIRE(br.points.size() == 2);
    CHECK(bs.points[0] == doctest::Approx(-br.points[1]).epsilon(1e-9));
    CHECK(bs.points[1] == doctest::Approx(-br.points[0]).epsilon(1e-9));
}

TEST_CASE("graph extraction from raw fields") {
    auto s = make_two_plane(4, 1, box(1.0 / 16));
    std::vector<double> ep, em;
    extract_graphs(s.u, ep, em);
    for (std::size_t i = 0; i < ep.size(); ++i) {
        CHECK(ep[i] == 0.0);
        CHECK(em[i] == 0.0);
    }
    const double h = 1.0 / 32;
    auto w = wedge(0.3, h);
    extract_graphs(w.u, ep, em);
    for (std::size_t i = 0; i < ep.size(); ++i) {
        CHECK(std::abs(ep[i] - w.eta_plus[i]) <= h);
        CHECK(std::abs(em[i] - w.eta_minus[i]) <= h);
        CHECK(em[i] <= ep[i]);
    }
}
