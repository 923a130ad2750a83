#include "fbw/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fbw/complex_ops.hpp"
#include "fbw/kernels.hpp"
#include "fbw/stencil.hpp"

namespace fbw {

namespace {

double parse_number(const std::string& s, const std::string& tag) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) throw InputError("bad number in obstacle case '" + tag + "'");
    return v;
}

std::vector<double> parse_params(const std::string& tag, std::size_t colon) {
    std::vector<double> out;
    if (colon == std::string::npos) return out;
    std::stringstream ss(tag.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, tag));
    return out;
}

void fill_second_differences(ObstacleSolution& s) {
    const GridSpec& g = s.grid;
    s.uxx = ScalarField(g, 0.0);
    s.uxy = ScalarField(g, 0.0);
    s.uyy = ScalarField(g, 0.0);
    const Mask in = erode(g, s.omega, 1);
    s.uxx.mask = s.uxy.mask = s.uyy.mask = in;
    const double ih2 = 1.0 / (g.h * g.h);
    for (int j = 1; j + 1 < g.ny; ++j)
        for (int i = 1; i + 1 < g.nx; ++i) {
            const auto k = g.idx(i, j);
            if (!in[k]) continue;
            const auto& u = s.u;
            s.uxx.values[k] = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) * ih2;
            s.uyy.values[k] = (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) * ih2;
            s.uxy.values[k] = 0.25 * ((u(i + 1, j + 1) - u(i + 1, j - 1)) - (u(i - 1, j + 1) - u(i - 1, j - 1))) * ih2;
        }
}

void finish(ObstacleSolution& s) {
    const GridSpec& g = s.grid;
    s.u.mask.assign(g.size(), 1);
    s.omega.assign(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) s.omega[k] = s.u.values[k] > 0.0 ? 1 : 0;
    fill_second_differences(s);
}

}  // namespace

ObstacleCase obstacle_case(const std::string& tag) {
    const auto colon = tag.find(':');
    const std::string name = tag.substr(0, colon);
    const std::vector<double> p = parse_params(tag, colon);
    auto need = [&](std::size_t n) {
        if (p.size() != n)
            throw InputError("obstacle case '" + name + "' takes " + std::to_string(n) + " parameter(s)");
    };
    ObstacleCase c;
    c.tag = tag;
    if (name == "halfspace") {
        need(0);
        c.exact = [](double, double y) { return y > 0.0 ? 0.5 * y * y : 0.0; };
    } else if (name == "radial") {
        need(1);
        const double R = p[0];
        if (!(R > 0.0 && R < 1.0)) throw InputError("radial case needs 0 < R < 1");
        c.exact = [R](double x, double y) {
            const double r = std::hypot(x, y);
            if (r <= R) return 0.0;
            return r * r / 4.0 - 0.5 * R * R * std::log(r / R) - R * R / 4.0;
        };
    } else if (name == "strip") {
        need(1);
        const double a = p[0];
        if (!(a > 0.0 && a < 1.0)) throw InputError("strip case needs 0 < a < 1");
        c.exact = [a](double, double y) {
            const double d = std::abs(y) - a;
            return d > 0.0 ? 0.5 * d * d : 0.0;
        };
    } else if (name == "sing") {
        need(0);
        c.exact = [](double, double y) { return 0.5 * y * y; };
        c.analytic = true;
    } else if (name == "zero") {
        need(0);
        c.exact = [](double, double) { return 0.0; };
    } else if (name == "pinched") {
        need(2);
        const double a = p[0], lift = p[1];
        if (!(a > 0.0 && a < 1.0) || !(lift >= 0.0 && lift < 1.0))
            throw InputError("pinched case needs 0 < a < 1, 0 <= c < 1");
        // strip half-width a at the sides; the lift c raises the top and bottom data toward x = 0,
        // flat enough at the corners that Delta u = 1 stays compatible there
        c.data = [a, lift](double x, double y) {
            const double q = 1.0 - x * x;
            const double d = std::abs(y) - a + lift * q * q * q;
            return d > 0.0 ? 0.5 * d * d : 0.0;
        };
        return c;
    } else {
        throw InputError("unknown obstacle case '" + tag + "'");
    }
    c.data = c.exact;
    return c;
}

double complementarity_residual(const ScalarField& u) {
    const GridSpec& g = u.grid;
    const double ih2 = 1.0 / (g.h * g.h);
    std::vector<double> lap(static_cast<std::size_t>(g.nx));
    double worst = 0.0;
    const auto& K = kernels::active();
    for (int j = 1; j + 1 < g.ny; ++j) {
        const double* row = &u.values[g.idx(0, j)];
        const double* up = &u.values[g.idx(0, j + 1)];
        const double* dn = &u.values[g.idx(0, j - 1)];
        const std::size_t n = static_cast<std::size_t>(g.nx - 2);
        K.laplace5(row, row + 2, dn + 1, up + 1, row + 1, ih2, lap.data(), n);
        for (std::size_t q = 0; q < n; ++q) {
            const double r = lap[q] - 1.0;
            worst = std::max(worst, row[q + 1] > 0.0 ? std::abs(r) : std::max(0.0, r));
        }
    }
    return worst;
}

namespace {

// roundoff floor of the 5-point residual for values of size umax
double residual_floor(const GridSpec& g, double umax) {
    return 256.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, umax) / (g.h * g.h);
}

void psor(ScalarField& field, double omega, double tol, int budget, int& sweep, double& res) {
    const GridSpec& g = field.grid;
    const double h2 = g.h * g.h;
    auto& u = field.values;
    const int check_every = 10;
    res = complementarity_residual(field);
    while (res > tol && sweep < budget) {
        for (int rep = 0; rep < check_every; ++rep, ++sweep)
            for (int j = 1; j + 1 < g.ny; ++j) {
                std::size_t k = g.idx(1, j);
                for (int i = 1; i + 1 < g.nx; ++i, ++k) {
                    const double gs = 0.25 * (((u[k - 1] + u[k + 1]) + (u[k - g.nx] + u[k + g.nx])) - h2);
                    u[k] = std::max(0.0, u[k] + omega * (gs - u[k]));
                }
            }
        res = complementarity_residual(field);
    }
}

double sor_factor(const GridSpec& g) {
    const double pi = std::numbers::pi;
    const double rho = 0.5 * (std::cos(pi / (g.nx - 1)) + std::cos(pi / (g.ny - 1)));
    return 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
}

// interior start: solve on the grid with spacing 2h when it nests, prolong bilinearly
std::vector<double> coarse_start(const GridSpec& g, const Fn2& data) {
    std::vector<double> out(g.size(), 0.0);
    if ((g.nx - 1) % 2 || (g.ny - 1) % 2 || g.nx < 33 || g.ny < 33) return out;
    GridSpec c{g.x0, g.y0, 2.0 * g.h, (g.nx - 1) / 2 + 1, (g.ny - 1) / 2 + 1};
    ObstacleOptions o;
    o.tol = 1e-6;
    ObstacleSolution cs;
    try {
        cs = solve_obstacle(c, data, o);
    } catch (const ConvergenceError&) {
        return out;
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int ci = i / 2, cj = j / 2;
            const int di = i % 2, dj = j % 2;
            auto at = [&](int a, int b) { return cs.u(std::min(a, c.nx - 1), std::min(b, c.ny - 1)); };
            out[g.idx(i, j)] = 0.25 * (at(ci, cj) + at(ci + di, cj) + at(ci, cj + dj) + at(ci + di, cj + dj));
        }
    return out;
}

}  // namespace

ObstacleSolution solve_obstacle(const GridSpec& g, const Fn2& data, const ObstacleOptions& opt) {
    g.validate();
    ObstacleSolution s;
    s.grid = g;
    s.u = ScalarField(g, 0.0);
    s.u.values = coarse_start(g, data);
    double umax = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (i != 0 && j != 0 && i != g.nx - 1 && j != g.ny - 1) continue;
            const double v = data(g.x(i), g.y(j));
            if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("obstacle data must be finite and nonnegative");
            s.u(i, j) = v;
            umax = std::max(umax, v);
        }
    const double omega = opt.omega > 0.0 ? opt.omega : sor_factor(g);
    const int budget = opt.max_sweeps > 0 ? opt.max_sweeps : 400 * (g.nx + g.ny);
    const double tol = std::max(opt.tol, residual_floor(g, umax));
    int sweep = 0;
    double res = 0.0;
    psor(s.u, omega, tol, budget, sweep, res);
    s.sweeps = sweep;
    s.residual = res;
    if (res > tol)
        throw ConvergenceError("obstacle solve did not converge; complementarity residual " + std::to_string(res),
                               res);
    finish(s);
    return s;
}

ObstacleSolution assemble_obstacle(const GridSpec& g, const Fn2& fn) {
    g.validate();
    ObstacleSolution s;
    s.grid = g;
    s.u = ScalarField::sample(g, fn);
    for (double v : s.u.values)
        if (!(v >= 0.0)) throw InputError("obstacle solution must be nonnegative");
    s.analytic = true;
    finish(s);
    s.residual = complementarity_residual(s.u);
    return s;
}

ObstacleSolution make_obstacle(const GridSpec& g, const ObstacleCase& c, const ObstacleOptions& opt) {
    ObstacleSolution s = c.analytic ? assemble_obstacle(g, c.exact) : solve_obstacle(g, c.data, opt);
    s.tag = c.tag;
    return s;
}

namespace {

}  // namespace

Mask clear_interior(const ObstacleSolution& sol, double clearance) {
    const GridSpec& g = sol.grid;
    std::vector<Point2> edge;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (sol.omega[g.idx(i, j)]) continue;
            bool touches = false;
            for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
                touches |= g.inside(i + di, j + dj) && sol.omega[g.idx(i + di, j + dj)];
            if (touches) edge.push_back({g.x(i), g.y(j)});
        }
    Mask out(g.size(), 0);
    const double c2 = clearance * clearance;
    for (int j = 2; j + 2 < g.ny; ++j)
        for (int i = 2; i + 2 < g.nx; ++i) {
            const auto k = g.idx(i, j);
            if (!sol.omega[k]) continue;
            bool ok = true;
            for (const auto& e : edge) {
                const double dx = g.x(i) - e.x, dy = g.y(j) - e.y;
                if (dx * dx + dy * dy < c2) {
                    ok = false;
                    break;
                }
            }
            out[k] = ok ? 1 : 0;
        }
    return out;
}

namespace {

struct FirstDerivs {
    ScalarField ux, uy;
};

FirstDerivs first_derivatives(const ObstacleSolution& sol) {
    return {diff_x(sol.u).field, diff_y(sol.u).field};
}

double masked_sup(const ScalarField& f, const Mask& m) {
    double out = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k)
        if (m[k] && f.mask[k]) out = std::max(out, std::abs(f.values[k]));
    return out;
}

std::vector<double> masked_values(const std::vector<double>& v, const Mask& m) {
    std::vector<double> out;
    for (std::size_t k = 0; k < m.size(); ++k)
        if (m[k]) out.push_back(v[k]);
    return out;
}

}  // namespace

ConjugatePair conjugate_pair(const ObstacleSolution& sol, double clearance) {
    const GridSpec& g = sol.grid;
    const auto [ux, uy] = first_derivatives(sol);
    ConjugatePair cp;
    cp.T = ComplexField(g);
    cp.S = ComplexField(g);
    cp.T.mask = cp.S.mask = sol.omega;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            if (!sol.omega[k]) continue;
            cp.T.re[k] = g.x(i) - ux.values[k];
            cp.T.im[k] = uy.values[k];
            cp.S.re[k] = uy.values[k] - g.y(j);
            cp.S.im[k] = ux.values[k];
            // T - iS = (Re T + Im S) + i (Im T - Re S)
            const double re = (cp.T.re[k] + cp.S.im[k]) - g.x(i), im = (cp.T.im[k] - cp.S.re[k]) - g.y(j);
            cp.identity = std::max(cp.identity, std::hypot(re, im));
        }
    cp.interior = clear_interior(sol, clearance);
    cp.cr_T = cauchy_riemann_residual(cp.T);
    cp.cr_S = cauchy_riemann_residual(cp.S);
    for (auto* f : {&cp.cr_T, &cp.cr_S})
        for (std::size_t k = 0; k < g.size(); ++k) {
            f->mask[k] = f->mask[k] && cp.interior[k];
            if (!f->mask[k]) f->values[k] = 0.0;
        }
    cp.cr_T_sup = masked_sup(cp.cr_T, cp.interior);
    cp.cr_S_sup = masked_sup(cp.cr_S, cp.interior);
    return cp;
}

ObstacleForms weierstrass_forms_obstacle(const ObstacleSolution& sol, double clearance) {
    const GridSpec& g = sol.grid;
    const double h = g.h;
    ObstacleForms f;
    f.alpha1 = OneForm(g);
    f.alpha2 = OneForm(g);
    f.alpha1.mask = f.alpha2.mask = sol.uxx.mask;
    for (std::size_t k = 0; k < g.size(); ++k) {
        f.alpha1.a[k] = sol.uyy.values[k];
        f.alpha1.b[k] = -sol.uxy.values[k];
        f.alpha2.a[k] = sol.uxy.values[k];
        f.alpha2.b[k] = -sol.uxx.values[k];
    }
    const Mask inner = mask_and(clear_interior(sol, clearance), sol.uxx.mask);
    long n_inner = 0;
    for (auto m : inner) n_inner += m;
    f.report.meta()["interior_samples"] = std::to_string(n_inner);
    if (n_inner == 0) f.report.warnings().push_back("no samples clear of the free boundary");

    const auto [ux, uy] = first_derivatives(sol);
    std::vector<double> target1(g.size()), target2(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            target1[k] = g.x(i) - ux.values[k];
            target2[k] = uy.values[k] - g.y(j);
        }

    std::vector<int> label;
    const int ncomp = label_components(g, f.alpha1.mask, 1, label);
    f.report.meta()["components"] = std::to_string(ncomp);
    const char* names[2] = {"alpha1", "alpha2"};
    const OneForm* forms[2] = {&f.alpha1, &f.alpha2};
    const std::vector<double>* targets[2] = {&target1, &target2};
    for (int q = 0; q < 2; ++q) {
        const OneForm& w = *forms[q];
        ScalarField a(g), b(g);
        a.values = w.a;
        b.values = w.b;
        a.mask = b.mask = w.mask;
        auto bx = diff_x(b).field, ay = diff_y(a).field;
        std::vector<double> closed(g.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k)
            if (bx.mask[k] && ay.mask[k]) closed[k] = bx.values[k] - ay.values[k];
        f.report.add(std::string("closedness_") + names[q], masked_values(closed, inner), 10.0 * h);

        std::vector<double> mismatch(g.size(), 0.0);
        for (int c = 0; c < ncomp; ++c) {
            OneForm part = w;
            bool any_inner = false;
            for (std::size_t k = 0; k < g.size(); ++k) {
                part.mask[k] = label[k] == c ? 1 : 0;
                any_inner |= part.mask[k] && inner[k];
            }
            if (!any_inner) continue;
            const auto base = nearest_active(g, mask_and(part.mask, inner), 0.0, 0.0);
            const Potential p = integrate_from_spine(part, base);
            const double shift = p.field.values[g.idx(base.first, base.second)] - (*targets[q])[g.idx(base.first, base.second)];
            for (std::size_t k = 0; k < g.size(); ++k)
                if (inner[k] && part.mask[k] && p.field.mask[k])
                    mismatch[k] = p.field.values[k] - (*targets[q])[k] - shift;
        }
        f.report.add(std::string("potential_") + names[q], masked_values(mismatch, inner), 20.0 * h);
    }

    // loops around each hole of the form's mask
    std::vector<int> holes;
    const int nholes = label_components(g, f.alpha1.mask, 0, holes);
    std::vector<double> period_abs;
    for (int c = 0; c < nholes; ++c) {
        int i0 = g.nx, i1 = -1, j0 = g.ny, j1 = -1;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (holes[g.idx(i, j)] == c) {
                    i0 = std::min(i0, i);
                    i1 = std::max(i1, i);
                    j0 = std::min(j0, j);
                    j1 = std::max(j1, j);
                }
        if (i0 == 0 || j0 == 0 || i1 == g.nx - 1 || j1 == g.ny - 1) continue;
        bool done = false;
        for (int pad = 2; pad <= 8 && !done; ++pad) {
            const double xa = g.x(std::max(0, i0 - pad)), xb = g.x(std::min(g.nx - 1, i1 + pad));
            const double ya = g.y(std::max(0, j0 - pad)), yb = g.y(std::min(g.ny - 1, j1 + pad));
            const std::vector<Point2> loop = {{xa, ya}, {xb, ya}, {xb, yb}, {xa, yb}, {xa, ya}};
            try {
                const double p1 = integrate_form(f.alpha1, loop), p2 = integrate_form(f.alpha2, loop);
                f.periods.emplace_back(p1, p2);
                period_abs.push_back(std::abs(p1));
                period_abs.push_back(std::abs(p2));
                done = true;
            } catch (const InputError&) {
            }
        }
        if (!done) f.report.warnings().push_back("no loop around hole " + std::to_string(c) + " stays in the mask");
    }
    f.report.add("periods", period_abs, 20.0 * h);
    return f;
}

}  // namespace fbw
