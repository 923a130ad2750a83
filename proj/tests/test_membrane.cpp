#include <cmath>

#include "doctest.h"
#include "fbw/complex_ops.hpp"
#include "fbw/membrane.hpp"

using namespace fbw;

namespace {
GridSpec box(double h) { return GridSpec::covering(-1, 1, -1, 1, h); }

MembraneState synthetic(double h, const std::function<double(double, double)>& wp,
                        const std::function<double(double, double)>& wm) {
    GridSpec up = GridSpec::covering(-0.5, 0.5, 0.0, 0.5, h);
    return make_membrane_state(up, ScalarField::sample(up, wp), ScalarField::sample(up, wm));
}
}  // namespace

TEST_CASE("chart Jacobian on the two-plane family") {
    for (double lam : {1.0, 2.0}) {
        auto s = make_two_plane(lam * lam, 1, box(1.0 / 16));
        WeierstrassOptions o;
        o.analytic = true;
        auto w = build_weierstrass(s, o);
        const double jexp = (1 + lam * lam) / (2 * lam);
        for (const auto* pr : {&std::as_const(w.plus_data), &std::as_const(w.minus_data)}) {
            const auto& surf = pr->phase > 0 ? w.plus : w.minus;
            Chart c = build_chart(*pr, surf);
            for (std::size_t k = 0; k < c.mask.size(); ++k)
                if (c.mask[k]) CHECK(c.j_closed.values[k] == doctest::Approx(jexp).epsilon(1e-12));
            CHECK(c.j_discrepancy <= 1e-10);
        }
    }
}

TEST_CASE("chart inversion") {
    auto s = make_two_plane(4, 1, box(1.0 / 16));
    WeierstrassOptions o;
    o.analytic = true;
    auto w = build_weierstrass(s, o);
    Chart c = build_chart(w.plus_data, w.plus);
    // T(x, y) = (1.25 x, 0.5 * 2 y) relative to the base
    HermiteField::Value sv, tv;
    REQUIRE(c.hs.eval(0.5, 0.5, sv));
    REQUIRE(c.ht.eval(0.5, 0.5, tv));
    Inverse inv = invert_chart(c, Point2{sv.f, tv.f});
    REQUIRE(inv.ok);
    CHECK(inv.src.x == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(inv.src.y == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_FALSE(invert_chart(c, Point2{50.0, 50.0}).ok);
}

TEST_CASE("degenerate chart is rejected") {
    auto g = GridSpec::covering(-0.5, 0.5, -0.5, 0.5, 1.0 / 16);
    WeierstrassData d;
    d.v = ScalarField::sample(g, [](double, double y) { return -y; });
    d.g = complex_gradient(d.v);
    auto surf = integrate_surface(d, default_base(g, d.g.mask));
    CHECK_THROWS_AS(build_chart(d, surf), InputError);
}

TEST_CASE("two-plane membranes coincide") {
    auto s = make_two_plane(4, 1, box(1.0 / 32));
    WeierstrassOptions o;
    o.analytic = true;
    auto w = build_weierstrass(s, o);
    MembraneState st = build_membrane(s, w);
    CHECK(st.flagged == 0);
    CHECK(st.d.sup_abs() <= 1e-10);
    CHECK(st.eig_min == doctest::Approx(0.512).epsilon(1e-9));
    CHECK(st.eig_max == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(st.c_lambda == doctest::Approx(1.25));
    for (int i = 0; i < st.grid.nx; ++i) {
        CHECK(st.target_plus[i] == doctest::Approx(-0.6));
        CHECK(st.target_minus[i] == doctest::Approx(0.6));
    }
    auto rep = membrane_residuals(st, &s);
    CHECK(rep.all_pass());
    CHECK(rep.sup("neumann_plus") <= 1e-9);
    CHECK(rep.sup("neumann_minus") <= 1e-9);
    CHECK(rep.sup("ordering_identity") <= 1e-9);
    auto tr = thin_obstacle_reduction(st);
    CHECK(tr.report.all_pass());
    CHECK(tr.count == 0);
}

TEST_CASE("Scherk state: two non-contact components") {
    const double a = 1.0;
    for (double h : {1.0 / 64, 1.0 / 128}) {
        auto st = synthetic(
            h, [](double, double) { return 0.0; },
            [a](double x, double y) { return std::log(std::cos(a * y) / std::cos(a * x)) / a; });
        auto tr = thin_obstacle_reduction(st, {1e-3, -1});
        INFO(tr.report.to_json());
        for (const auto& c : tr.report.checks())
            if (c.name != "B_eigen_bounds") CHECK(c.pass);
        // G-only upper bound fails where the gradient vanishes
        CHECK_FALSE(tr.report.at("B_eigen_bounds").pass);
        CHECK(tr.count == 2);
    }
}

TEST_CASE("separating plane: one component and nonzero flux") {
    auto st = synthetic(1.0 / 64, [](double, double) { return 0.0; }, [](double, double y) { return 1.0 + y; });
    auto tr = thin_obstacle_reduction(st);
    CHECK(tr.count == 1);
    CHECK(tr.report.sup("div_B_grad_d") <= 1e-12);
    CHECK_FALSE(tr.report.at("flux_free").pass);
}

TEST_CASE("B must be positive definite") {
    MembraneState st;
    st.eig_min = 0.0;
    CHECK_THROWS_AS(thin_obstacle_reduction(st), InputError);
}
