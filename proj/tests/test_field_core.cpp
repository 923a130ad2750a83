#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fbw/complex_ops.hpp"
#include "fbw/harmonic.hpp"
#include "fbw/stencil.hpp"

using namespace fbw;

namespace {

double flat_profile(double x) { return x == 0.0 ? 0.0 : -0.2 * std::exp(-1.0 / (x * x)); }

// Strip {f(x) < y < 1} on [-1, 1], zero on the graph, linear in y on the sides.
HarmonicSolution strip_solve(double h) {
    const double fbar = -0.2 * 0.2;  // rough mean; only the data's consistency matters
    CutDomain dom;
    dom.grid = GridSpec::covering(-1, 1, -0.25, 1, h);
    dom.level = [](double x, double y) { return std::min(y - flat_profile(x), 1.0 - y + 1e-12); };
    dom.value = [&](double x, double y) {
        const double f = flat_profile(x);
        return (1.0 - fbar) * (y - f) / (1.0 - f);
    };
    return solve_dirichlet_harmonic(dom);
}

double sup_diff_on_coarse(const ScalarField& coarse, const ScalarField& fine) {
    double e = 0.0;
    for (int j = 0; j < coarse.grid.ny; ++j)
        for (int i = 0; i < coarse.grid.nx; ++i) {
            if (!coarse.active(i, j) || !fine.active(2 * i, 2 * j)) continue;
            e = std::max(e, std::abs(coarse(i, j) - fine(2 * i, 2 * j)));
        }
    return e;
}

}  // namespace

TEST_CASE("grid spec validation") {
    GridSpec g;
    g.h = 0.0;
    CHECK_THROWS_AS(g.validate(), InputError);
    g.h = 0.1;
    g.nx = 2;
    CHECK_THROWS_AS(g.validate(), InputError);
    auto c = GridSpec::covering(-1, 1, 0, 1, 0.25);
    CHECK(c.nx == 9);
    CHECK(c.ny == 5);
    CHECK(c.x(4) == 0.0);
}

TEST_CASE("dirichlet solve reproduces harmonic polynomials") {
    auto g = GridSpec::covering(0, 1, 0, 1, 1.0 / 32);
    SUBCASE("x^2 - y^2") {
        auto data = ScalarField::sample(g, [](double x, double y) { return x * x - y * y; });
        auto exact = data;
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) data(i, j) = 0.0;
        auto sol = solve_dirichlet_harmonic(data);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(sol.field.values[k] == doctest::Approx(exact.values[k]).epsilon(1e-10));
    }
    SUBCASE("cubic x^3 - 3 x y^2") {
        auto exact = ScalarField::sample(g, [](double x, double y) { return x * x * x - 3 * x * y * y; });
        auto sol = solve_dirichlet_harmonic(exact);
        double e = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(sol.field.values[k] - exact.values[k]));
        CHECK(e < 1e-10);
    }
}

TEST_CASE("upper half box with linear data") {
    auto g = GridSpec::covering(-1, 1, 0, 1, 1.0 / 16);
    auto data = ScalarField::sample(g, [](double, double y) { return y; });
    auto sol = solve_dirichlet_harmonic(data);
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) e = std::max(e, std::abs(sol.field(i, j) - g.y(j)));
    CHECK(e < 1e-11);
}

TEST_CASE("disconnected masks are rejected") {
    auto g = GridSpec::covering(0, 1, 0, 1, 0.125);
    ScalarField data(g);
    for (int j = 0; j < g.ny; ++j) data.mask[g.idx(4, j)] = 0;
    CHECK_THROWS_AS(solve_dirichlet_harmonic(data), InputError);
}

TEST_CASE("iteration budget exhaustion reports the residual") {
    auto g = GridSpec::covering(0, 1, 0, 1, 1.0 / 32);
    auto data = ScalarField::sample(g, [](double x, double) { return x; });
    for (int j = 1; j + 1 < g.ny; ++j)
        for (int i = 1; i + 1 < g.nx; ++i) data(i, j) = 0.0;
    HarmonicOptions opt;
    opt.max_sweeps = 3;
    try {
        solve_dirichlet_harmonic(data, opt);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("curved strip solve converges at second order") {
    // Richardson-style study: successive differences on the coarse samples.
    auto s1 = strip_solve(1.0 / 16), s2 = strip_solve(1.0 / 32), s3 = strip_solve(1.0 / 64);
    CHECK(s3.residual <= 1e-11);
    auto lap = laplacian5(s3.field);
    double worst = 0.0;
    for (std::size_t k = 0; k < lap.grid.size(); ++k)
        if (lap.mask[k] && s3.unknown[k])
            worst = std::max(worst, std::abs(lap.values[k]) * lap.grid.h * lap.grid.h / 4);
    CHECK(worst <= 10 * 1e-12);
    const double e12 = sup_diff_on_coarse(s1.field, s2.field);
    const double e23 = sup_diff_on_coarse(s2.field, s3.field);
    CHECK(e12 / e23 > 3.0);
}

TEST_CASE("complex gradient of simple fields") {
    auto g = GridSpec::covering(-1, 1, -1, 1, 0.125);
    SUBCASE("v = y") {
        auto cg = complex_gradient(ScalarField::sample(g, [](double, double y) { return y; }));
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(cg.re[k] == doctest::Approx(0.0));
            CHECK(cg.im[k] == doctest::Approx(-1.0));
        }
    }
    SUBCASE("v = x^2 - y^2 gives 2z") {
        auto cg = complex_gradient(ScalarField::sample(g, [](double x, double y) { return x * x - y * y; }));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                CHECK(cg.re[g.idx(i, j)] == doctest::Approx(2 * g.x(i)));
                CHECK(cg.im[g.idx(i, j)] == doctest::Approx(2 * g.y(j)));
            }
    }
    SUBCASE("two-plane plus phase, lambda = 2") {
        auto cg = complex_gradient(ScalarField::sample(g, [](double, double y) { return 2.0 * y; }));
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(cg.re[k] == doctest::Approx(0.0));
            CHECK(cg.im[k] == doctest::Approx(-2.0));
            CHECK(std::hypot(cg.re[k], cg.im[k]) == doctest::Approx(2.0));
        }
    }
    SUBCASE("mask too thin") {
        ScalarField v(g);
        v.mask.assign(g.size(), 0);
        v.mask[g.idx(3, 3)] = 1;
        CHECK_THROWS_AS(complex_gradient(v), InputError);
    }
}

TEST_CASE("harmonic conjugates of polynomials") {
    auto g = GridSpec::covering(-1, 1, -1, 1, 0.125);
    SUBCASE("v = y -> x") {
        auto v = ScalarField::sample(g, [](double, double y) { return y; });
        auto c = harmonic_conjugate(v, default_base(g, v.mask));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) CHECK(c.field(i, j) == doctest::Approx(g.x(i)).epsilon(1e-12));
        CHECK(c.path_residual < 1e-13);
    }
    SUBCASE("v = xy -> (x^2 - y^2)/2") {
        auto v = ScalarField::sample(g, [](double x, double y) { return x * y; });
        auto c = harmonic_conjugate(v, default_base(g, v.mask));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i), y = g.y(j);
                CHECK(c.field(i, j) == doctest::Approx(0.5 * (x * x - y * y)).scale(1.0).epsilon(1e-12));
            }
    }
}

TEST_CASE("conjugate of the strip solution is path independent at O(h^2)") {
    double prev = 0.0;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        auto s = strip_solve(h);
        auto c = harmonic_conjugate(s.field, default_base(s.field.grid, s.field.mask));
        if (prev > 0.0) CHECK(prev / c.path_residual > 3.0);
        prev = c.path_residual;
        // Round trip: F = vbar + i v carries v in its imaginary part unchanged.
        ComplexField F(s.field.grid);
        F.re = c.field.values;
        F.im = s.field.values;
        CHECK(F.im == s.field.values);
    }
}

TEST_CASE("conjugate on a punctured domain reports the period") {
    auto g = GridSpec::covering(-1, 1, -1, 1, 1.0 / 32);
    auto v = ScalarField::sample(g, [](double x, double y) { return std::log(std::hypot(x, y) + 1e-300); });
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (std::hypot(g.x(i), g.y(j)) < 0.3) v.mask[g.idx(i, j)] = 0;
    CHECK_THROWS_AS(harmonic_conjugate(v, {g.nx - 1, g.ny / 2}), InputError);
}

TEST_CASE("line integrals of forms") {
    auto g = GridSpec::covering(-1, 3, -1, 2, 0.125);
    OneForm dx(g);
    for (auto& a : dx.a) a = 1.0;
    CHECK(integrate_form(dx, {{0, 0}, {1, 0}}) == doctest::Approx(1.0));

    // alpha_1 = u_yy dx - u_xy dy for u = (y_+)^2 / 2 on {y > 0}.
    auto u = ScalarField::sample(g, [](double, double y) { return y > 0 ? 0.5 * y * y : 0.0; });
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.mask[g.idx(i, j)] = g.y(j) > 0 ? 1 : 0;
    auto H = hessian(u);
    OneForm a1(g);
    a1.mask = mask_and(H.yy.mask, H.xy.mask);
    for (std::size_t k = 0; k < g.size(); ++k) {
        a1.a[k] = H.yy.values[k];
        a1.b[k] = -H.xy.values[k];
    }
    CHECK(integrate_form(a1, {{0, 1}, {2, 1}}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(integrate_form(a1, {{0, 1}, {0, -0.5}}), InputError);
}

TEST_CASE("cauchy-riemann residuals") {
    auto g = GridSpec::covering(-1, 1, -1, 1, 0.125);
    ComplexField z2(g), zbar(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            const double x = g.x(i), y = g.y(j);
            z2.re[k] = x * x - y * y;
            z2.im[k] = 2 * x * y;
            zbar.re[k] = x;
            zbar.im[k] = -y;
        }
    auto r1 = cauchy_riemann_residual(z2);
    auto r2 = cauchy_riemann_residual(zbar);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(r1.values[k] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(r2.values[k] == doctest::Approx(2.0));
    }
}

TEST_CASE("property: gradients of discretely harmonic fields are O(h^2) holomorphic") {
    // exp(x) cos(y) solved discretely from its own boundary trace.
    double prev = 0.0;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        auto g = GridSpec::covering(-1, 1, -1, 1, h);
        auto data = ScalarField::sample(g, [](double x, double y) { return std::exp(x) * std::cos(y); });
        auto sol = solve_dirichlet_harmonic(data);
        auto cr = cauchy_riemann_residual(complex_gradient(sol.field));
        auto interior = erode(g, cr.mask, 2);
        double e = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (interior[k]) e = std::max(e, cr.values[k]);
        if (prev > 0.0) CHECK(prev / e > 3.5);
        prev = e;
    }
}

TEST_CASE("property: closed loops of closed forms integrate to ~0") {
    auto g = GridSpec::covering(-1, 1, -1, 1, 1.0 / 64);
    // d(sin x * y^2) is exact.
    OneForm w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            w.a[g.idx(i, j)] = std::cos(x) * y * y;
            w.b[g.idx(i, j)] = 2 * std::sin(x) * y;
        }
    std::vector<Point2> loop;
    for (int k = 0; k <= 200; ++k) {
        const double t = 2 * std::numbers::pi * k / 200;
        loop.push_back({0.6 * std::cos(t), 0.6 * std::sin(t)});
    }
    CHECK(std::abs(integrate_form(w, loop)) < 1e-3);
}
