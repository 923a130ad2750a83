#include "fbw/membrane.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fbw/stencil.hpp"

namespace fbw {
namespace {

// Gauss-Legendre on [0, 1], 8 nodes.
constexpr double kGLx[8] = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355, 0.4082826787521751,
                            0.5917173212478249,   0.7627662049581645,  0.8983332387068134, 0.9801449282487681};
constexpr double kGLw[8] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363, 0.18134189168918100,
                            0.18134189168918100, 0.15685332293894363, 0.11119051722668724, 0.05061426814518813};

ScalarField sample_with(const GridSpec& g, const Mask& m, const std::vector<double>& v) {
    ScalarField f(g, 0.0);
    f.mask = m;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (m[k]) f.values[k] = v[k];
    return f;
}

HermiteField hermite(const GridSpec& g, const Mask& m, const std::vector<double>& f, const std::vector<double>& fx,
                     const std::vector<double>& fy) {
    const ScalarField dx = sample_with(g, m, fx);
    const Derivative dxy = diff_y(dx);
    return HermiteField(g, f, fx, fy, dxy.field.values, mask_and(m, dxy.field.mask));
}

void eig2(double a, double b, double c, double& lo, double& hi) {
    const double m = 0.5 * (a + c), r = std::hypot(0.5 * (a - c), b);
    lo = m - r;
    hi = m + r;
}

bool chart_eval(const Chart& c, double x, double y, HermiteField::Value& s, HermiteField::Value& t) {
    return c.hs.eval_near(x, y, s) && c.ht.eval_near(x, y, t);
}

}  // namespace

Chart make_chart(const GridSpec& g, const Mask& mask, const std::vector<double>& s, const std::vector<double>& t,
                 const std::vector<double>& sx, const std::vector<double>& sy, const std::vector<double>& tx,
                 const std::vector<double>& ty, const ChartOptions& opt) {
    Chart c;
    c.grid = g;
    c.opt = opt;
    c.j_min = opt.j_min;
    const std::size_t n = g.size();
    std::vector<double> jc(n, 0.0);
    c.mask.assign(n, 0);
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (!mask[k]) continue;
        jc[k] = sx[k] * ty[k] - sy[k] * tx[k];
        if (jc[k] > opt.j_min) {
            c.mask[k] = 1;
            any = true;
        }
    }
    if (!any) throw InputError("chart degenerate: J <= J_min everywhere");
    c.s = sample_with(g, c.mask, s);
    c.t = sample_with(g, c.mask, t);
    c.j_closed = sample_with(g, c.mask, jc);

    const Gradient gs = gradient(c.s), gt = gradient(c.t);
    c.j_numeric = ScalarField(g, 0.0);
    c.j_numeric.mask = mask_and(mask_and(gs.gx.mask, gs.gy.mask), mask_and(gt.gx.mask, gt.gy.mask));
    const Mask inner = erode(g, c.mask, 2);
    for (std::size_t k = 0; k < n; ++k) {
        if (!c.j_numeric.mask[k]) continue;
        c.j_numeric.values[k] = gs.gx.values[k] * gt.gy.values[k] - gs.gy.values[k] * gt.gx.values[k];
        if (inner[k]) c.j_discrepancy = std::max(c.j_discrepancy, std::abs(c.j_numeric.values[k] - jc[k]));
    }
    c.hs = hermite(g, c.mask, c.s.values, sx, sy);
    c.ht = hermite(g, c.mask, c.t.values, tx, ty);

    double smin = 1e300, smax = -1e300, tmin = 1e300, tmax = -1e300, jmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!c.mask[k]) continue;
        smin = std::min(smin, c.s.values[k]);
        smax = std::max(smax, c.s.values[k]);
        tmin = std::min(tmin, c.t.values[k]);
        tmax = std::max(tmax, c.t.values[k]);
        jmax = std::max(jmax, jc[k]);
    }
    c.diam = std::max({smax - smin, tmax - tmin, g.h});
    c.bucket = 2.0 * g.h * std::max(1.0, std::sqrt(jmax));
    c.s0 = smin;
    c.t0 = tmin;
    c.bx = static_cast<int>((smax - smin) / c.bucket) + 1;
    c.by = static_cast<int>((tmax - tmin) / c.bucket) + 1;
    c.bins.assign(static_cast<std::size_t>(c.bx) * c.by, {});
    for (std::size_t k = 0; k < n; ++k) {
        if (!c.mask[k]) continue;
        const int bi = std::min(c.bx - 1, static_cast<int>((c.s.values[k] - smin) / c.bucket));
        const int bj = std::min(c.by - 1, static_cast<int>((c.t.values[k] - tmin) / c.bucket));
        c.bins[static_cast<std::size_t>(bj) * c.bx + bi].push_back(k);
    }
    return c;
}

Chart build_chart(const WeierstrassData& d, const WeierstrassSurface& surf, const ChartOptions& opt) {
    const GridSpec& g = d.g.grid;
    const double f = d.f;
    const std::size_t n = g.size();
    std::vector<double> sx(n, 0.0), sy(n, 0.0), tx(n, 0.0), ty(n, 0.0), px(n, 0.0), py(n, 0.0);
    const Mask m = mask_and(d.g.mask, surf.psi1.mask);
    for (std::size_t k = 0; k < n; ++k) {
        if (!m[k]) continue;
        const double a = d.g.re[k], b = -d.g.im[k];
        sx[k] = 0.5 * f * (1.0 - a * a + b * b);
        sy[k] = -f * a * b;
        tx[k] = f * a;
        ty[k] = f * b;
        px[k] = f * a * b;
        py[k] = -0.5 * f * (1.0 + a * a - b * b);
    }
    Chart c = make_chart(g, m, surf.psi1.values, surf.x3.values, sx, sy, tx, ty, opt);
    c.phase = d.phase;
    // closed form 1/2 f^2 v_y (1 + |grad v|^2), equal to the determinant above
    for (std::size_t k = 0; k < n; ++k) {
        if (!c.mask[k]) continue;
        const double a = d.g.re[k], b = -d.g.im[k];
        c.j_closed.values[k] = 0.5 * f * f * b * (1.0 + a * a + b * b);
    }
    c.hpsi2 = hermite(g, c.mask, surf.psi2.values, px, py);
    return c;
}

Inverse invert_chart(const Chart& c, Point2 target) {
    Inverse out;
    const GridSpec& g = c.grid;
    // seed: nearest forward sample, rings of bins
    const int ci = static_cast<int>(std::floor((target.x - c.s0) / c.bucket));
    const int cj = static_cast<int>(std::floor((target.y - c.t0) / c.bucket));
    std::size_t best = 0;
    double bd = -1.0;
    const int rmax = std::max(c.bx, c.by) + 1;
    for (int r = 0; r <= rmax; ++r) {
        for (int dj = -r; dj <= r; ++dj)
            for (int di = -r; di <= r; ++di) {
                if (std::max(std::abs(di), std::abs(dj)) != r) continue;
                const int i = ci + di, j = cj + dj;
                if (i < 0 || j < 0 || i >= c.bx || j >= c.by) continue;
                for (std::size_t k : c.bins[static_cast<std::size_t>(j) * c.bx + i]) {
                    const double ds = c.s.values[k] - target.x, dt = c.t.values[k] - target.y;
                    const double d2 = ds * ds + dt * dt;
                    if (bd < 0.0 || d2 < bd) {
                        bd = d2;
                        best = k;
                    }
                }
            }
        // a hit in ring r can be beaten by ring r + 1 only
        if (bd >= 0.0 && std::sqrt(bd) <= r * c.bucket) break;
    }
    if (bd < 0.0) return out;
    double x = g.x0 + static_cast<double>(best % g.nx) * g.h;
    double y = g.y0 + static_cast<double>(best / g.nx) * g.h;

    HermiteField::Value S, T;
    if (!chart_eval(c, x, y, S, T)) return out;
    double fs = S.f - target.x, ft = T.f - target.y, res = std::hypot(fs, ft);
    const double stop = 1e-15 * c.diam;
    int it = 0;
    for (; it < c.opt.max_newton && res > stop; ++it) {
        const double det = S.fx * T.fy - S.fy * T.fx;
        if (!(det > 0.0)) break;
        const double dx = -(T.fy * fs - S.fy * ft) / det;
        const double dy = -(-T.fx * fs + S.fx * ft) / det;
        double lam = 1.0;
        bool moved = false;
        for (int half = 0; half < 30; ++half, lam *= 0.5) {
            HermiteField::Value S2, T2;
            const double nx = x + lam * dx, ny = y + lam * dy;
            if (!chart_eval(c, nx, ny, S2, T2)) continue;
            const double fs2 = S2.f - target.x, ft2 = T2.f - target.y, r2 = std::hypot(fs2, ft2);
            if (r2 < res) {
                x = nx, y = ny, S = S2, T = T2, fs = fs2, ft = ft2, res = r2;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    out.src = Point2{x, y};
    out.residual = res;
    out.iterations = it;
    out.ok = res <= c.opt.newton_tol * c.diam;
    return out;
}

std::vector<Inverse> invert_chart(const Chart& c, const std::vector<Point2>& targets) {
    std::vector<Inverse> out;
    out.reserve(targets.size());
    for (const Point2& p : targets) out.push_back(invert_chart(c, p));
    return out;
}

MembraneState make_membrane_state(const GridSpec& upper, const ScalarField& w_plus, const ScalarField& w_minus_r) {
    MembraneState st;
    st.grid = upper;
    st.w_plus = w_plus;
    st.w_minus_r = w_minus_r;
    const std::size_t n = upper.size();
    st.d = ScalarField(upper, 0.0);
    st.d.mask = mask_and(w_plus.mask, w_minus_r.mask);
    for (std::size_t k = 0; k < n; ++k)
        if (st.d.mask[k]) st.d.values[k] = w_minus_r.values[k] - w_plus.values[k];

    const Gradient gp = gradient(w_plus), gm = gradient(w_minus_r);
    st.b11 = st.b12 = st.b22 = ScalarField(upper, 0.0);
    Mask bm(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const bool okp = gp.gx.mask[k] && gp.gy.mask[k], okm = gm.gx.mask[k] && gm.gy.mask[k];
        if (okp) st.g_sup = std::max(st.g_sup, std::hypot(gp.gx.values[k], gp.gy.values[k]));
        if (okm) st.g_sup = std::max(st.g_sup, std::hypot(gm.gx.values[k], gm.gy.values[k]));
        if (!okp || !okm) continue;
        bm[k] = 1;
        double b11 = 0, b12 = 0, b22 = 0;
        for (int q = 0; q < 8; ++q) {
            const double tau = kGLx[q];
            const double p1 = tau * gm.gx.values[k] + (1 - tau) * gp.gx.values[k];
            const double p2 = tau * gm.gy.values[k] + (1 - tau) * gp.gy.values[k];
            const double r = 1.0 + p1 * p1 + p2 * p2, den = r * std::sqrt(r);
            b11 += kGLw[q] * (r - p1 * p1) / den;
            b12 += kGLw[q] * (-p1 * p2) / den;
            b22 += kGLw[q] * (r - p2 * p2) / den;
        }
        st.b11.values[k] = b11;
        st.b12.values[k] = b12;
        st.b22.values[k] = b22;
    }
    st.b11.mask = st.b12.mask = st.b22.mask = bm;
    bool first = true;
    for (std::size_t k = 0; k < n; ++k) {
        if (!bm[k]) continue;
        double lo, hi;
        eig2(st.b11.values[k], st.b12.values[k], st.b22.values[k], lo, hi);
        st.eig_min = first ? lo : std::min(st.eig_min, lo);
        st.eig_max = first ? hi : std::max(st.eig_max, hi);
        first = false;
    }
    return st;
}

MembraneState build_membrane(const TwoPhaseSolution& sol, const WeierstrassPair& w, const MembraneOptions& opt) {
    const Chart cp = build_chart(w.plus_data, w.plus, opt.chart);
    const Chart cm = build_chart(w.minus_data, w.minus, opt.chart);
    const GridSpec& g = cp.grid;
    const double h = g.h;

    double lo, hi, tmax;
    if (opt.window) {
        lo = (*opt.window)[0];
        hi = (*opt.window)[1];
        tmax = (*opt.window)[2];
    } else {
        lo = -1e300, hi = 1e300;
        double tp = 1e300, tm = 1e300;
        for (const Chart* c : {&cp, &cm}) {
            for (int j = 0; j < g.ny; ++j) {
                int first = -1, last = -1;
                for (int i = 0; i < g.nx; ++i)
                    if (c->mask[g.idx(i, j)]) {
                        if (first < 0) first = i;
                        last = i;
                    }
                if (first < 0) continue;
                lo = std::max(lo, c->s(first, j));
                hi = std::min(hi, c->s(last, j));
            }
            for (int i = 0; i < g.nx; ++i) {
                double far = 0.0;
                bool seen = false;
                for (int j = 0; j < g.ny; ++j)
                    if (c->mask[g.idx(i, j)]) {
                        far = std::max(far, std::abs(c->t(i, j)));
                        seen = true;
                    }
                if (!seen) continue;
                (c->phase > 0 ? tp : tm) = std::min(c->phase > 0 ? tp : tm, far);
            }
        }
        lo += 2 * h;
        hi -= 2 * h;
        tmax = std::min(tp, tm) - 2 * h;
    }
    GridSpec up;
    up.h = h;
    up.x0 = std::ceil(lo / h) * h;
    up.y0 = 0.0;
    up.nx = static_cast<int>(std::floor((hi - up.x0) / h + 1e-9)) + 1;
    up.ny = static_cast<int>(std::floor(tmax / h + 1e-9)) + 1;
    if (!(hi > lo) || up.nx < 3 || up.ny < 3) throw InputError("chart windows are disjoint");

    const std::size_t n = up.size();
    ScalarField wp(up, 0.0), wm(up, 0.0);
    wp.mask.assign(n, 0);
    wm.mask.assign(n, 0);
    std::vector<double> xp(up.nx, 0.0), xm(up.nx, 0.0);
    long flagged = 0;
    for (int j = 0; j < up.ny; ++j)
        for (int i = 0; i < up.nx; ++i) {
            const double s = up.x(i), t = up.y(j);
            const auto k = up.idx(i, j);
            const Inverse a = invert_chart(cp, Point2{s, t});
            HermiteField::Value v;
            if (a.ok && cp.hpsi2.eval_near(a.src.x, a.src.y, v)) {
                wp.values[k] = v.f;
                wp.mask[k] = 1;
                if (j == 0) xp[i] = a.src.x;
            } else {
                ++flagged;
            }
            const Inverse b = invert_chart(cm, Point2{s, -t});
            if (b.ok && cm.hpsi2.eval_near(b.src.x, b.src.y, v)) {
                wm.values[k] = v.f;
                wm.mask[k] = 1;
                if (j == 0) xm[i] = b.src.x;
            } else {
                ++flagged;
            }
        }
    MembraneState st = make_membrane_state(up, wp, wm);
    st.flagged = flagged;
    const double lam = sol.lambda();
    st.c_lambda = (1 + lam * lam) / (2 * lam);
    st.src_x = xp;
    st.target_plus.resize(up.nx);
    st.target_minus.resize(up.nx);
    for (int i = 0; i < up.nx; ++i) {
        const double mp = sol.coefficient(1, xp[i]) / w.plus_data.other;
        const double mm = sol.coefficient(-1, xm[i]) / w.minus_data.other;
        st.target_plus[i] = (1 - mp) / (1 + mp);
        st.target_minus[i] = (1 - mm) / (1 + mm);
    }
    st.has_targets = true;
    return st;
}

namespace {

ScalarField mse_residual(const ScalarField& w) {
    const GridSpec& g = w.grid;
    const Gradient gr = gradient(w);
    ScalarField qx(g, 0.0), qy(g, 0.0);
    qx.mask = qy.mask = mask_and(gr.gx.mask, gr.gy.mask);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!qx.mask[k]) continue;
        const double a = gr.gx.values[k], b = gr.gy.values[k], r = std::sqrt(1 + a * a + b * b);
        qx.values[k] = a / r;
        qy.values[k] = b / r;
    }
    const Derivative dx = diff_x(qx), dy = diff_y(qy);
    ScalarField out(g, 0.0);
    out.mask = mask_and(mask_and(dx.field.mask, dy.field.mask), erode(g, w.mask, 2));
    for (std::size_t k = 0; k < g.size(); ++k)
        if (out.mask[k]) out.values[k] = dx.field.values[k] + dy.field.values[k];
    return out;
}

std::vector<double> masked_values(const ScalarField& f) {
    std::vector<double> v;
    for (std::size_t k = 0; k < f.values.size(); ++k)
        if (f.mask[k]) v.push_back(f.values[k]);
    return v;
}

// trace classes: 1 coincidence, 0 free, -1 adjacent to a change or invalid
std::vector<int> trace_classes(const MembraneState& st, double ctol) {
    const int nx = st.grid.nx;
    std::vector<int> raw(nx, -2), out(nx, -1);
    for (int i = 0; i < nx; ++i)
        if (st.d.active(i, 0)) raw[i] = st.d(i, 0) <= ctol ? 1 : 0;
    for (int i = 0; i < nx; ++i) {
        if (raw[i] < 0) continue;
        const bool edge = (i > 0 && raw[i - 1] >= 0 && raw[i - 1] != raw[i]) ||
                          (i + 1 < nx && raw[i + 1] >= 0 && raw[i + 1] != raw[i]);
        out[i] = edge ? -1 : raw[i];
    }
    return out;
}

}  // namespace

ResidualReport membrane_residuals(const MembraneState& st, const TwoPhaseSolution* sol,
                                  const MembraneCheckOptions& opt) {
    const GridSpec& g = st.grid;
    const double ctol = opt.contact_tol < 0.0 ? 4.0 * g.h * st.c_lambda : opt.contact_tol;
    ResidualReport rep;
    rep.add("mse_plus", masked_values(mse_residual(st.w_plus)), opt.tol);
    rep.add("mse_minus", masked_values(mse_residual(st.w_minus_r)), opt.tol);

    const Gradient gp = gradient(st.w_plus), gm = gradient(st.w_minus_r);
    const std::vector<int> cls = trace_classes(st, ctol);
    std::vector<double> neu[2], slack[2], order;
    long ex_neu[2] = {0, 0}, ex_slack[2] = {0, 0};
    for (int i = 0; i < g.nx; ++i) {
        if (st.d.active(i, 0)) order.push_back(std::max(0.0, -st.d(i, 0)));
        if (!st.has_targets) continue;
        const auto k = g.idx(i, 0);
        double val[2];
        bool ok[2];
        ok[0] = gp.gx.mask[k] && gp.gy.mask[k];
        ok[1] = gm.gx.mask[k] && gm.gy.mask[k];
        if (ok[0]) {
            const double a = gp.gx.values[k], b = gp.gy.values[k];
            val[0] = -b / std::sqrt(1 + a * a + b * b) - st.target_plus[i];
        }
        if (ok[1]) {
            const double a = gm.gx.values[k], b = gm.gy.values[k];
            val[1] = b / std::sqrt(1 + a * a + b * b) - st.target_minus[i];
        }
        for (int p = 0; p < 2; ++p) {
            if (cls[i] < 0 || !ok[p]) {
                ++ex_neu[p];
                ++ex_slack[p];
                continue;
            }
            if (cls[i] == 0)
                neu[p].push_back(val[p]);
            else
                slack[p].push_back(std::max(0.0, val[p]));
        }
    }
    if (st.has_targets) {
        rep.add("neumann_plus", neu[0], opt.tol, ex_neu[0]);
        rep.add("neumann_minus", neu[1], opt.tol, ex_neu[1]);
        rep.add("coincidence_slack_plus", slack[0], opt.tol, ex_slack[0]);
        rep.add("coincidence_slack_minus", slack[1], opt.tol, ex_slack[1]);
    }
    rep.add("ordering", order, opt.tol);

    if (sol && !sol->coef_plus && !sol->coef_minus && st.has_targets) {
        std::vector<double> id;
        for (int i = 0; i < g.nx; ++i) {
            if (!st.d.active(i, 0)) continue;
            const double x = st.src_x[i];
            const double ep = sol->eta_plus_fn ? sol->eta_plus_fn(x) : linear_sample(sol->xs, sol->eta_plus, x);
            const double em = sol->eta_minus_fn ? sol->eta_minus_fn(x) : linear_sample(sol->xs, sol->eta_minus, x);
            id.push_back(-st.d(i, 0) + st.c_lambda * (ep - em));
        }
        rep.add("ordering_identity", id, opt.tol);
    }
    rep.meta()["flagged_points"] = std::to_string(st.flagged);
    return rep;
}

ThinObstacleResult thin_obstacle_reduction(const MembraneState& st, const MembraneCheckOptions& opt) {
    const GridSpec& g = st.grid;
    if (!(st.eig_min > 0.0)) throw InputError("B is not positive definite (min eigenvalue " + std::to_string(st.eig_min) + ")");
    const double ctol = opt.contact_tol < 0.0 ? 4.0 * g.h * st.c_lambda : opt.contact_tol;
    ThinObstacleResult out;
    ResidualReport& rep = out.report;

    const Gradient gd = gradient(st.d);
    ScalarField F1(g, 0.0), F2(g, 0.0);
    F1.mask = F2.mask = mask_and(mask_and(gd.gx.mask, gd.gy.mask), st.b11.mask);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!F1.mask[k]) continue;
        const double dx = gd.gx.values[k], dy = gd.gy.values[k];
        F1.values[k] = st.b11.values[k] * dx + st.b12.values[k] * dy;
        F2.values[k] = st.b12.values[k] * dx + st.b22.values[k] * dy;
    }
    const Derivative dF1 = diff_x(F1), dF2 = diff_y(F2);
    const Mask inner = mask_and(mask_and(dF1.field.mask, dF2.field.mask), erode(g, st.d.mask, 2));
    std::vector<double> div;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (inner[k]) div.push_back(dF1.field.values[k] + dF2.field.values[k]);
    rep.add("div_B_grad_d", div, opt.tol);

    const double G2 = st.g_sup * st.g_sup;
    const double lo = std::pow(1 + G2, -1.5), hi = std::pow(1 + G2, -0.5);
    // global bounds from G, and local ones from the gradient range on the tau segment
    const Gradient gp = gradient(st.w_plus), gm = gradient(st.w_minus_r);
    std::vector<double> eb, el;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!st.b11.mask[k]) continue;
        double a, b;
        eig2(st.b11.values[k], st.b12.values[k], st.b22.values[k], a, b);
        eb.push_back(std::max({0.0, lo - a, b - hi}));
        const double p1 = gp.gx.values[k], p2 = gp.gy.values[k];
        const double q1 = gm.gx.values[k] - p1, q2 = gm.gy.values[k] - p2;
        const double qq = q1 * q1 + q2 * q2;
        const double tau = qq > 0 ? std::clamp(-(p1 * q1 + p2 * q2) / qq, 0.0, 1.0) : 0.0;
        const double pmin = std::hypot(p1 + tau * q1, p2 + tau * q2);
        const double pmax = std::max(std::hypot(p1, p2), std::hypot(p1 + q1, p2 + q2));
        el.push_back(std::max({0.0, std::pow(1 + pmax * pmax, -1.5) - a, b - std::pow(1 + pmin * pmin, -0.5)}));
    }
    rep.add("B_eigen_bounds", eb, 1e-12);
    rep.add("B_eigen_local", el, 1e-12);

    const std::vector<int> cls = trace_classes(st, ctol);
    std::vector<double> sign, freef, fsign, comp;
    long ex_free = 0, ex_sign = 0;
    for (int i = 0; i < g.nx; ++i) {
        if (!st.d.active(i, 0)) continue;
        const double dv = st.d(i, 0);
        sign.push_back(std::max(0.0, -dv));
        if (!F2.active(i, 0)) {
            ++ex_free;
            continue;
        }
        const double fl = F2(i, 0);
        comp.push_back(dv * fl);
        if (cls[i] < 0) {
            ++(dv > ctol ? ex_free : ex_sign);
            continue;
        }
        if (cls[i] == 0)
            freef.push_back(fl);
        else
            fsign.push_back(std::max(0.0, -fl));
    }
    rep.add("trace_sign", sign, ctol);
    rep.add("flux_free", freef, opt.tol, ex_free);
    rep.add("flux_sign", fsign, opt.tol, ex_sign);
    rep.add("complementarity", comp, ctol * ctol);

    // non-contact intervals on the trace
    int i = 0;
    auto above = [&](int k) { return st.d.active(k, 0) && st.d(k, 0) > ctol; };
    auto cross = [&](int a, int b) {
        const double da = st.d(a, 0) - ctol, db = st.d(b, 0) - ctol;
        return g.x(a) + (g.x(b) - g.x(a)) * da / (da - db);
    };
    while (i < g.nx) {
        if (!above(i)) {
            ++i;
            continue;
        }
        const int start = i;
        while (i + 1 < g.nx && above(i + 1)) ++i;
        const double a = (start > 0 && st.d.active(start - 1, 0)) ? cross(start - 1, start) : g.x(start);
        const double b = (i + 1 < g.nx && st.d.active(i + 1, 0)) ? cross(i, i + 1) : g.x(i);
        out.intervals.emplace_back(a, b);
        ++i;
    }
    out.count = static_cast<int>(out.intervals.size());
    rep.meta()["noncontact_components"] = std::to_string(out.count);
    return out;
}

}  // namespace fbw
