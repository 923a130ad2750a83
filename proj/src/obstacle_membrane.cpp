#include <algorithm>
#include <cmath>

#include "fbw/complex_ops.hpp"
#include "fbw/obstacle.hpp"
#include "fbw/stencil.hpp"

namespace fbw {

namespace {

// fourth-order centered difference; zero where the stencil leaves the grid
std::vector<double> d4(const GridSpec& g, const std::vector<double>& f, bool along_x) {
    std::vector<double> out(g.size(), 0.0);
    const double c = 1.0 / (12.0 * g.h);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int a = along_x ? i : j, n = along_x ? g.nx : g.ny;
            if (a < 2 || a + 2 >= n) continue;
            auto at = [&](int o) { return along_x ? f[g.idx(i + o, j)] : f[g.idx(i, j + o)]; };
            out[g.idx(i, j)] = c * ((at(-2) - at(2)) + 8.0 * (at(1) - at(-1)));
        }
    return out;
}

double graph_at(const DerivativeGraphs& d, const std::vector<double>& eta, double x, bool& ok) {
    ok = false;
    if (d.xs.size() < 2 || x < d.xs.front() || x > d.xs.back()) return 0.0;
    const double h = d.xs[1] - d.xs[0];
    const std::size_t i = std::min(d.xs.size() - 2, static_cast<std::size_t>((x - d.xs.front()) / h));
    if (!d.valid[i] || !d.valid[i + 1]) return 0.0;
    const double w = (x - d.xs[i]) / h;
    ok = true;
    return (1.0 - w) * eta[i] + w * eta[i + 1];
}

}  // namespace

ObstacleMembrane obstacle_membrane(const ObstacleSolution& sol, const DerivativeGraphs& graphs, double tol,
                                   double clearance) {
    const GridSpec& g = sol.grid;
    const double h = g.h;
    const auto ux = diff_x(sol.u).field, uy = diff_y(sol.u).field;
    std::vector<double> s(g.size()), t(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            s[k] = g.x(i) - ux.values[k];
            t[k] = uy.values[k];
        }
    const Mask inner = erode(g, sol.omega, 3);
    if (std::none_of(inner.begin(), inner.end(), [](auto m) { return m != 0; }))
        throw InputError("Omega too thin for the membrane chart");

    ObstacleMembrane out;
    ChartOptions copt;
    copt.j_min = 1e-3;
    out.chart = make_chart(g, inner, s, t, d4(g, s, true), d4(g, s, false), d4(g, t, true), d4(g, t, false), copt);

    const double margin = 0.25;
    const int lo = static_cast<int>(std::ceil((g.x0 + margin) / h - 1e-9));
    const int hi = static_cast<int>(std::floor((g.x1() - margin) / h + 1e-9));
    const int rows = static_cast<int>(std::floor(0.25 / h + 1e-9)) + 1;
    if (hi - lo < 4 || rows < 8) throw InputError("grid too coarse for the membrane window");
    GridSpec up{lo * h, 0.0, h, hi - lo + 1, rows};
    out.first_row = 3;

    ScalarField wp(up, 0.0), wm(up, 0.0);
    wp.mask.assign(up.size(), 0);
    wm.mask.assign(up.size(), 0);
    std::vector<Point2> targets;
    std::vector<std::size_t> where;
    for (int j = out.first_row; j < up.ny; ++j)
        for (int i = 0; i < up.nx; ++i) {
            targets.push_back({up.x(i), up.y(j)});
            targets.push_back({up.x(i), -up.y(j)});
            where.push_back(up.idx(i, j));
        }
    const auto inv = invert_chart(out.chart, targets);
    long flagged = 0;
    for (std::size_t q = 0; q < where.size(); ++q) {
        const auto k = where[q];
        const Inverse& p = inv[2 * q];
        const Inverse& m = inv[2 * q + 1];
        if (p.ok) {
            wp.values[k] = targets[2 * q].y - p.src.y;
            wp.mask[k] = 1;
        } else {
            ++flagged;
        }
        if (m.ok) {
            // w-(s, -t) = u_y - y at the source
            wm.values[k] = targets[2 * q + 1].y - m.src.y;
            wm.mask[k] = 1;
        } else {
            ++flagged;
        }
    }
    // traces
    std::vector<double> ord;
    long trace_missing = 0;
    for (int i = 0; i < up.nx; ++i) {
        bool okp = false, okm = false;
        const double ep = graph_at(graphs, graphs.eta_plus, up.x(i), okp);
        const double em = graph_at(graphs, graphs.eta_minus, up.x(i), okm);
        if (!okp || !okm) {
            ++trace_missing;
            continue;
        }
        const auto k = up.idx(i, 0);
        wp.values[k] = -ep;
        wm.values[k] = -em;
        wp.mask[k] = wm.mask[k] = 1;
        ord.push_back(std::max(0.0, -(ep - em) - tol));
    }

    out.state = make_membrane_state(up, wp, wm);
    out.state.flagged = flagged;
    ResidualReport& rep = out.report;
    rep.meta()["flagged"] = std::to_string(flagged);
    rep.meta()["trace_missing"] = std::to_string(trace_missing);

    // upper nodes whose sources sit clear of the contact set
    const Mask clear = clear_interior(sol, clearance);
    Mask clear_p(up.size(), 0), clear_m(up.size(), 0);
    auto clear_at = [&](Point2 p) {
        const int i = static_cast<int>(std::lround((p.x - g.x0) / h)), j = static_cast<int>(std::lround((p.y - g.y0) / h));
        return g.inside(i, j) && clear[g.idx(i, j)] != 0;
    };
    for (std::size_t q = 0; q < where.size(); ++q) {
        clear_p[where[q]] = inv[2 * q].ok && clear_at(inv[2 * q].src);
        clear_m[where[q]] = inv[2 * q + 1].ok && clear_at(inv[2 * q + 1].src);
    }

    // rows first_row + 1 .. : 5-point Laplacian on inverted samples only
    const char* names[2] = {"harmonic_plus", "harmonic_minus"};
    const ScalarField* fields[2] = {&out.state.w_plus, &out.state.w_minus_r};
    const Mask* clears[2] = {&clear_p, &clear_m};
    for (int q = 0; q < 2; ++q) {
        const ScalarField& w = *fields[q];
        const Mask& c = *clears[q];
        std::vector<double> r;
        long excluded = 0;
        for (int j = out.first_row + 1; j + 1 < up.ny; ++j)
            for (int i = 1; i + 1 < up.nx; ++i) {
                const auto k = up.idx(i, j);
                if (!(c[k] && c[k - 1] && c[k + 1] && c[k - up.nx] && c[k + up.nx])) {
                    ++excluded;
                    continue;
                }
                r.push_back((w(i - 1, j) + w(i + 1, j) + w(i, j - 1) + w(i, j + 1) - 4.0 * w(i, j)) / (h * h));
            }
        rep.add(names[q], r, 50.0 * h * h, excluded);
    }

    // quadratic extrapolation of the first inverted rows to t = 0 against the traces
    const char* tnames[2] = {"trace_plus", "trace_minus"};
    for (int q = 0; q < 2; ++q) {
        const ScalarField& w = *fields[q];
        std::vector<double> r;
        const int a = out.first_row;
        const double ta = a, tb = a + 1, tc = a + 2;
        const double la = (tb * tc) / ((ta - tb) * (ta - tc)), lb = (ta * tc) / ((tb - ta) * (tb - tc)),
                     lc = (ta * tb) / ((tc - ta) * (tc - tb));
        for (int i = 0; i < up.nx; ++i)
            if (w.active(i, 0) && w.active(i, a) && w.active(i, a + 1) && w.active(i, a + 2))
                r.push_back(la * w(i, a) + lb * w(i, a + 1) + lc * w(i, a + 2) - w(i, 0));
        rep.add(tnames[q], r, 10.0 * h);
    }
    rep.add("ordering", ord, 0.0);

    // (w+ - w-) d_t w+- on the trace; d_t by central differences on inverted rows a+1..a+3,
    // extrapolated quadratically to t = 0 (the trace row itself is graph data)
    {
        const int a = out.first_row;
        const double n1 = a + 1, n2 = a + 2, n3 = a + 3;
        const double l1 = (n2 * n3) / ((n1 - n2) * (n1 - n3)), l2 = (n1 * n3) / ((n2 - n1) * (n2 - n3)),
                     l3 = (n1 * n2) / ((n3 - n1) * (n3 - n2));
        std::vector<double> r;
        const ScalarField& wp2 = out.state.w_plus;
        const ScalarField& wm2 = out.state.w_minus_r;
        auto dt0 = [&](const ScalarField& w, int i, double& v) {
            for (int j = a; j <= a + 4; ++j)
                if (!w.active(i, j)) return false;
            auto c = [&](int j) { return (w(i, j + 1) - w(i, j - 1)) / (2.0 * h); };
            v = l1 * c(a + 1) + l2 * c(a + 2) + l3 * c(a + 3);
            return true;
        };
        for (int i = 0; i < up.nx; ++i) {
            double dp = 0.0, dm = 0.0;
            if (!wp2.active(i, 0) || !dt0(wp2, i, dp) || !dt0(wm2, i, dm)) continue;
            const double gap = wp2(i, 0) - wm2(i, 0);
            r.push_back(std::max(std::abs(gap * dp), std::abs(gap * dm)));
        }
        rep.add("complementarity", r, 10.0 * h);
    }

    // grad w+ = (u_xy, -u_yy) / |grad u_y|^2 + (0, 1) at the source
    {
        const Gradient gw = gradient(out.state.w_plus);
        std::vector<double> r;
        for (int j = out.first_row + 1; j + 1 < up.ny; ++j)
            for (int i = 1; i + 1 < up.nx; ++i) {
                const auto k = up.idx(i, j);
                if (!gw.gx.mask[k] || !gw.gy.mask[k] || gw.onesided[k]) continue;
                if (!(clear_p[k] && clear_p[k - 1] && clear_p[k + 1] && clear_p[k - up.nx] && clear_p[k + up.nx])) continue;
                const std::size_t q = static_cast<std::size_t>(j - out.first_row) * up.nx + i;
                const Inverse& p = inv[2 * q];
                if (!p.ok) continue;
                double xy = 0.0, yy = 0.0;
                if (!bilinear(g, sol.uxy.values, sol.uxy.mask, p.src.x, p.src.y, xy) ||
                    !bilinear(g, sol.uyy.values, sol.uyy.mask, p.src.x, p.src.y, yy))
                    continue;
                const double det = xy * xy + yy * yy;
                if (!(det > 0.0)) continue;
                r.push_back(std::hypot(gw.gx.values[k] - xy / det, gw.gy.values[k] - (1.0 - yy / det)));
            }
        rep.add("gradient_identity", r, 10.0 * h);
    }
    if (flagged > 0) rep.warnings().push_back(std::to_string(flagged) + " membrane samples failed to invert");
    return out;
}

}  // namespace fbw
