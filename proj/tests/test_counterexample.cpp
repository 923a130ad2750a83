#include <cmath>

#include "doctest.h"
#include "fbw/counterexample.hpp"

using namespace fbw;

TEST_CASE("interval union validation and merging") {
    CHECK_THROWS_AS(IntervalUnion({{0.5, 0.2}}), InputError);
    CHECK_THROWS_AS(IntervalUnion({{-1.5, 0.0}}), InputError);
    CHECK_THROWS_AS(IntervalUnion({{0.0, NAN}}), InputError);

    IntervalUnion K({{0.2, 0.6}, {-0.6, -0.2}, {0.5, 0.7}});
    REQUIRE(K.parts().size() == 2);
    CHECK(K.parts()[1].first == 0.2);
    CHECK(K.parts()[1].second == 0.7);
    CHECK(K.contains(-0.4));
    CHECK_FALSE(K.contains(0.0));
    CHECK(K.boundary() == std::vector<double>{-0.6, -0.2, 0.2, 0.7});
    CHECK(K.complement().size() == 3);

    IntervalUnion pt({{0.0, 0.0}});
    CHECK(pt.boundary() == std::vector<double>{0.0});
    IntervalUnion all({{-1.0, 1.0}});
    CHECK(all.boundary().empty());
    CHECK(all.complement().empty());
}

TEST_CASE("flat profile") {
    const double h = 1.0 / 128;
    std::vector<double> xs;
    for (int i = -128; i <= 128; ++i) xs.push_back(i * h);

    IntervalUnion K({{-0.5, 0.5}});
    auto p = build_f(K, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (K.contains(xs[i]))
            CHECK(p.f[i] == 0.0);
        else
            CHECK(p.f[i] < 0.0);
    }
    // finite differences up to order 4 at the right end of K
    const std::size_t at = 192;
    REQUIRE(xs[at] == 0.5);
    std::vector<double> d(p.f.begin() + at, p.f.begin() + at + 5);
    for (int order = 1; order <= 4; ++order) {
        for (std::size_t k = 0; k + 1 < d.size(); ++k) d[k] = d[k + 1] - d[k];
        d.pop_back();
        CHECK(std::abs(d[0]) / std::pow(h, order) <= 10 * h * h);
    }
    CHECK(p.clamped > 0);
    CHECK(p.clamp_distance > 0.0);

    auto z = build_f(IntervalUnion({{0.0, 0.0}}), xs);
    CHECK(z.f[128] == 0.0);
    CHECK(flat_value(IntervalUnion({{0.0, 0.0}}), 0.5) < 0.0);

    auto all = build_f(IntervalUnion({{-1.0, 1.0}}), xs);
    for (double v : all.f) CHECK(v == 0.0);
    CHECK(all.warnings.size() == 1);
}

TEST_CASE("half bundle of the zero profile is the identity") {
    auto b = build_half_bundle(IntervalUnion({{-1.0, 1.0}}), 1.0 / 32);
    const GridSpec& g = b.grid;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (b.psi.mask[g.idx(i, j)])
                worst = std::max({worst, std::abs(b.v(i, j) - g.y(j)), std::abs(b.vbar(i, j) - g.x(i))});
    CHECK(worst <= 1e-8);
    CHECK(b.hopf_min == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(psi_preimage_x(b, 0.3) == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("half bundle conformality refines") {
    IntervalUnion K({{-0.5, 0.5}});
    auto a = build_half_bundle(K, 1.0 / 64), b = build_half_bundle(K, 1.0 / 128);
    CHECK(b.cr_residual < a.cr_residual / 3.0);
    CHECK(b.hopf_min > 0.1);
}

TEST_CASE("assembled counterexample") {
    IntervalUnion K({{-0.5, 0.5}});
    auto [cb, sol] = assemble_counterexample(K, 1.0 / 32);
    CHECK(cb.oddness == 0.0);
    CHECK(cb.trace_agreement == 0.0);
    CHECK(cb.flagged == 0);
    CHECK(cb.inversion_discrepancy < 1e-2);
    for (std::size_t i = 0; i < sol.xs.size(); ++i) {
        CHECK(sol.eta_plus[i] == -sol.eta_minus[i]);
        CHECK(sol.eta_plus[i] >= 0.0);
    }
    const GridSpec& g = sol.u.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j), r = g.idx(i, g.ny - 1 - j);
            if (sol.plus[k]) CHECK(sol.u.values[r] == -sol.u.values[k]);
        }
}

TEST_CASE("identity map case") {
    auto [cb, sol] = assemble_counterexample(IntervalUnion({{-1.0, 1.0}}), 1.0 / 32);
    for (double e : sol.eta_plus) CHECK(e == 0.0);
    CHECK(sol.lambda_plus == doctest::Approx(1.0).epsilon(1e-8));
    auto v = verify_branching_prescription(cb, sol);
    CHECK(v.pass);
    CHECK(v.measured.empty());
}

TEST_CASE("branching set equals the boundary of K") {
    const std::vector<IntervalUnion> sets = {IntervalUnion({{-0.5, 0.5}}), IntervalUnion({{0.0, 0.0}}),
                                             IntervalUnion({{-0.6, -0.2}, {0.2, 0.6}})};
    for (const auto& K : sets)
        for (double h : {1.0 / 32, 1.0 / 64}) {
            auto [cb, sol] = assemble_counterexample(K, h);
            auto v = verify_branching_prescription(cb, sol);
            CHECK(v.pass);
            CHECK(v.measured.size() == K.boundary().size());
            CHECK(v.hausdorff <= 4 * h);
        }
}
