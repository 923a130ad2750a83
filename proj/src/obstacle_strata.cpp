#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbw/complex_ops.hpp"
#include "fbw/obstacle.hpp"
#include "fbw/stencil.hpp"

namespace fbw {

namespace {

constexpr double kPi = std::numbers::pi;

// integral of sqrt(r^2 - X^2)
double arc_primitive(double X, double r) {
    X = std::clamp(X, -r, r);
    return 0.5 * (X * std::sqrt(std::max(0.0, r * r - X * X)) + r * r * std::asin(X / r));
}

// |{X <= px, Y <= py} cap disk(0, r)|
double quadrant_area(double px, double py, double r) {
    const double hi = std::min(px, r);
    if (hi <= -r || py <= -r) return 0.0;
    auto chord = [&](double a, double b) { return a < b ? 2.0 * (arc_primitive(b, r) - arc_primitive(a, r)) : 0.0; };
    auto half = [&](double a, double b) { return a < b ? (arc_primitive(b, r) - arc_primitive(a, r)) + py * (b - a) : 0.0; };
    if (py >= r) return chord(-r, hi);
    const double a = std::sqrt(r * r - py * py);
    if (py >= 0.0)
        // full chord where |X| > a, partial inside
        return chord(-r, std::min(hi, -a)) + half(-a, std::min(hi, a)) + chord(a, hi);
    return half(-a, std::min(hi, a));
}

Point2 averaged_gradient(const ObstacleSolution& sol, int i, int j) {
    const GridSpec& g = sol.grid;
    Point2 n{0.0, 0.0};
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            const int a = i + di, b = j + dj;
            if (!g.inside(a - 1, b - 1) || !g.inside(a + 1, b + 1)) continue;
            n.x += sol.u(a + 1, b) - sol.u(a - 1, b);
            n.y += sol.u(a, b + 1) - sol.u(a, b - 1);
        }
    const double len = std::hypot(n.x, n.y);
    if (len > 0.0) return {n.x / len, n.y / len};
    // fall back to the mean direction of the Omega neighbours
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
            if (g.inside(i + di, j + dj) && sol.omega[g.idx(i + di, j + dj)]) {
                n.x += di;
                n.y += dj;
            }
    const double l2 = std::hypot(n.x, n.y);
    return l2 > 0.0 ? Point2{n.x / l2, n.y / l2} : Point2{0.0, 1.0};
}

}  // namespace

const char* density_name(Density d) {
    switch (d) {
        case Density::Reg: return "reg";
        case Density::Sing: return "sing";
        case Density::Unresolved: return "unresolved";
        case Density::Flagged: return "flagged";
    }
    return "?";
}

double disk_rect_area(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
    if (!(r > 0.0) || x1 <= x0 || y1 <= y0) return 0.0;
    x0 -= cx;
    x1 -= cx;
    y0 -= cy;
    y1 -= cy;
    const double a = quadrant_area(x1, y1, r) - quadrant_area(x0, y1, r) - quadrant_area(x1, y0, r) +
                     quadrant_area(x0, y0, r);
    return std::max(0.0, a);
}

double omega_density(const ObstacleSolution& sol, Point2 c, double r) {
    const GridSpec& g = sol.grid;
    const double h = g.h;
    const int i0 = std::max(0, static_cast<int>(std::floor((c.x - r - g.x0) / h)) - 1);
    const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil((c.x + r - g.x0) / h)) + 1);
    const int j0 = std::max(0, static_cast<int>(std::floor((c.y - r - g.y0) / h)) - 1);
    const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil((c.y + r - g.y0) / h)) + 1);
    double area = 0.0;
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (sol.omega[g.idx(i, j)])
                area += disk_rect_area(c.x, c.y, r, g.x(i) - 0.5 * h, g.x(i) + 0.5 * h, g.y(j) - 0.5 * h,
                                       g.y(j) + 0.5 * h);
    return area / (kPi * r * r);
}

DerivativeGraphs derivative_graphs(const ObstacleSolution& sol) {
    const GridSpec& g = sol.grid;
    const auto uy = diff_y(sol.u).field;
    DerivativeGraphs d;
    d.xs.resize(g.nx);
    d.eta_plus.assign(g.nx, 0.0);
    d.eta_minus.assign(g.nx, 0.0);
    d.valid.assign(g.nx, 0);
    for (int i = 0; i < g.nx; ++i) {
        d.xs[i] = g.x(i);
        auto v = [&](int j) { return uy(i, j); };
        // runs of u_y > 0 from the top and u_y < 0 from the bottom; an empty run puts
        // the graph on the box edge
        int top = g.ny, bot = -1;
        while (top > 0 && v(top - 1) > 0.0) --top;
        while (bot + 1 < g.ny && v(bot + 1) < 0.0) ++bot;
        bool clean = top > bot;
        for (int j = bot + 1; j < top && clean; ++j) clean = v(j) == 0.0;
        if (!clean) {
            ++d.flagged_columns;
            continue;
        }
        if (top == bot + 1) {
            // plain sign change
            const double y = g.y(bot) + g.h * v(bot) / (v(bot) - v(top));
            d.eta_plus[i] = d.eta_minus[i] = y;
        } else {
            // linear extrapolation from two samples clear of the contact edge
            auto extrap = [&](int j1, int j2) {
                const double s = (v(j2) - v(j1)) / (g.y(j2) - g.y(j1));
                return s != 0.0 ? g.y(j1) - v(j1) / s : g.y(j1);
            };
            if ((top < g.ny && top + 2 >= g.ny) || (bot >= 0 && bot - 2 < 0)) {
                ++d.flagged_columns;
                continue;
            }
            d.eta_plus[i] = top == g.ny ? g.y1() : std::clamp(extrap(top + 1, top + 2), g.y(top - 1), g.y(top));
            d.eta_minus[i] = bot < 0 ? g.y0 : std::clamp(extrap(bot - 1, bot - 2), g.y(bot), g.y(bot + 1));
        }
        d.valid[i] = 1;
    }
    for (int i = 0; i < g.nx; ++i) {
        if (!d.valid[i]) continue;
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            if (std::min(std::abs(y - d.eta_plus[i]), std::abs(y - d.eta_minus[i])) <= 2.0 * g.h) continue;
            const bool predicted = y > d.eta_minus[i] && y < d.eta_plus[i];
            const bool contact = sol.omega[g.idx(i, j)] == 0;
            if (predicted != contact) ++d.interior_mismatch;
        }
    }
    return d;
}

BoundaryStratification stratify_boundary(const ObstacleSolution& sol, std::vector<double> radii) {
    const GridSpec& g = sol.grid;
    const double h = g.h;
    if (radii.empty()) radii = {8.0 * h, 16.0 * h, 32.0 * h};
    for (double r : radii)
        if (!(r > 0.0)) throw InputError("density radii must be positive");
    BoundaryStratification st;
    st.radii = radii;
    // least squares theta = theta0 + b / r, read at 1/r = 0
    double m1 = 0.0, m2 = 0.0;
    for (double r : radii) {
        m1 += 1.0 / r;
        m2 += 1.0 / (r * r);
    }
    const double n = static_cast<double>(radii.size());
    const double den = n * m2 - m1 * m1;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (sol.omega[g.idx(i, j)]) continue;
            bool touches = false;
            for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
                touches |= g.inside(i + di, j + dj) && sol.omega[g.idx(i + di, j + dj)];
            if (!touches) continue;
            BoundarySample b;
            b.i = i;
            b.j = j;
            b.normal = averaged_gradient(sol, i, j);
            const double x = g.x(i), y = g.y(j);
            const double reach = radii.back();
            if (x - reach < g.x0 || x + reach > g.x1() || y - reach < g.y0 || y + reach > g.y1()) {
                b.label = Density::Flagged;
                ++st.flagged;
                st.samples.push_back(std::move(b));
                continue;
            }
            double sy = 0.0, sxy = 0.0;
            for (double r : radii) {
                const double th = omega_density(sol, {x, y}, r);
                b.theta_r.push_back(th);
                sy += th;
                sxy += th / r;
            }
            b.theta = den > 0.0 ? (sy * m2 - m1 * sxy) / den : sy / n;
            if (std::abs(b.theta - 0.5) <= 0.1) {
                b.label = Density::Reg;
                ++st.reg;
            } else if (b.theta >= 0.9) {
                b.label = Density::Sing;
                ++st.sing;
            } else {
                b.label = Density::Unresolved;
                ++st.unresolved;
            }
            st.samples.push_back(std::move(b));
        }
    st.graphs = derivative_graphs(sol);
    return st;
}

ResidualReport boundary_condition_check(const ObstacleSolution& sol, const BoundaryStratification& st, Point2 e) {
    const GridSpec& g = sol.grid;
    const double h = g.h;
    const double el = std::hypot(e.x, e.y);
    if (!(el > 0.0)) throw InputError("direction must be nonzero");
    e = {e.x / el, e.y / el};
    ResidualReport rep;
    std::vector<double> general, e2;
    long skipped = 0;
    for (const auto& b : st.samples) {
        if (b.label != Density::Reg) continue;
        if (e.x * b.normal.x + e.y * b.normal.y <= 0.1) continue;
        const double x = g.x(b.i), y = g.y(b.j);
        // second differences carry O(h^2 / t^2) noise at distance t from the free
        // boundary; nodes at t0 ~ h^0.4 balance it against the cubic extrapolation bias
        const double t0 = 0.25 * std::pow(h, 0.4);
        const double tn[3] = {t0, 1.5 * t0, 2.0 * t0};
        double H[3][3], U[2];
        bool ok = true;
        const Mask all(g.size(), 1);
        for (int q = 0; q < 3 && ok; ++q) {
            const double px = x + tn[q] * b.normal.x, py = y + tn[q] * b.normal.y;
            ok = bilinear(g, sol.uxx.values, sol.uxx.mask, px, py, H[q][0]) &&
                 bilinear(g, sol.uxy.values, sol.uxy.mask, px, py, H[q][1]) &&
                 bilinear(g, sol.uyy.values, sol.uyy.mask, px, py, H[q][2]);
        }
        for (int q = 0; q < 2 && ok; ++q)
            ok = bilinear(g, sol.u.values, all, x + (2 + q) * h * b.normal.x, y + (2 + q) * h * b.normal.y, U[q]);
        if (!ok) {
            ++skipped;
            continue;
        }
        // u ~ (t - t_fb)^2 / 2 along nu next to a regular free boundary
        const double tfb = std::clamp(0.5 * ((2.0 * h - std::sqrt(2.0 * U[0])) + (3.0 * h - std::sqrt(2.0 * U[1]))),
                                      -h, 2.0 * h);
        double L[3];
        for (int a = 0; a < 3; ++a) {
            L[a] = 1.0;
            for (int c = 0; c < 3; ++c)
                if (c != a) L[a] *= (tfb - tn[c]) / (tn[a] - tn[c]);
        }
        auto at = [&](int c) { return L[0] * H[0][c] + L[1] * H[1][c] + L[2] * H[2][c]; };
        const double xx = at(0), xy = at(1), yy = at(2);
        // grad u_e = D2u e
        const double gx = xx * e.x + xy * e.y, gy = xy * e.x + yy * e.y;
        general.push_back((gx * gx + gy * gy) - (e.x * gx + e.y * gy));
        e2.push_back((xy * xy + yy * yy) - yy);
    }
    rep.add("boundary_condition", general, 0.25, skipped);
    rep.add("boundary_condition_e2", e2, 0.25, skipped);
    rep.meta()["samples"] = std::to_string(general.size());
    if (general.empty()) rep.warnings().push_back("no regular boundary samples facing the direction");
    return rep;
}

BranchingSet branching_points_obstacle(const ObstacleSolution& sol, const BoundaryStratification& st,
                                       double gap_tol) {
    const GridSpec& g = sol.grid;
    const double h = g.h;
    if (gap_tol < 0.0) gap_tol = h;
    BranchingSet out;
    out.tol = gap_tol;
    out.h = h;
    const auto& d = st.graphs;
    // transitions are read run by run over valid columns
    std::vector<double> xs, gap;
    auto flush = [&] {
        if (xs.size() >= 2)
            for (double x : locate_transitions(xs, gap, gap_tol, h)) out.points.push_back(x);
        xs.clear();
        gap.clear();
    };
    for (int i = 0; i < g.nx; ++i) {
        if (!d.valid[i]) {
            flush();
            continue;
        }
        xs.push_back(d.xs[i]);
        gap.push_back(d.eta_plus[i] - d.eta_minus[i]);
    }
    flush();
    // keep transitions with a singular sample within 4h
    std::vector<double> kept;
    for (double x : out.points) {
        bool near = false;
        for (const auto& b : st.samples)
            if (b.label == Density::Sing && std::abs(g.x(b.i) - x) <= 4.0 * h) {
                near = true;
                break;
            }
        if (near) kept.push_back(x);
    }
    std::sort(kept.begin(), kept.end());
    out.points = std::move(kept);
    return out;
}

double first_stratum_angle(const ObstacleSolution& sol) {
    const GridSpec& g = sol.grid;
    double xx = 0.0, xy = 0.0, yy = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!sol.uxx.mask[k]) continue;
        xx += sol.uxx.values[k];
        xy += sol.uxy.values[k];
        yy += sol.uyy.values[k];
    }
    // dominant eigenvector of [[xx, xy], [xy, yy]]
    const double phi = 0.5 * std::atan2(2.0 * xy, xx - yy);
    // angle of (cos phi, sin phi) against e2
    double a = phi - 0.5 * kPi;
    while (a <= -0.5 * kPi) a += kPi;
    while (a > 0.5 * kPi) a -= kPi;
    return a;
}

ObstacleSolution rotate_obstacle(const ObstacleSolution& sol, double angle) {
    const GridSpec& g = sol.grid;
    const double c = std::cos(angle), s = std::sin(angle);
    const Mask all(g.size(), 1);
    auto fn = [&](double x, double y) {
        // value at the preimage under rotation by `angle`
        const double px = c * x + s * y, py = -s * x + c * y;
        double v = 0.0;
        if (!bilinear(g, sol.u.values, all, std::clamp(px, g.x0, g.x1()), std::clamp(py, g.y0, g.y1()), v)) return 0.0;
        return std::max(0.0, v);
    };
    ObstacleSolution out = assemble_obstacle(g, fn);
    out.analytic = sol.analytic;
    out.tag = sol.tag;
    return out;
}

}  // namespace fbw
