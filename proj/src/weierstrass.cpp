#include "fbw/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fbw/complex_ops.hpp"
#include "fbw/stencil.hpp"

namespace fbw {
namespace {

using cplx = std::complex<double>;

struct Vec3 {
    double x, y, z;
};
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(Vec3 a, Vec3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

double cot(Vec3 p, Vec3 a, Vec3 b) {
    const Vec3 u = a - p, v = b - p;
    return dot(u, v) / norm(cross(u, v));
}

ScalarField restrict(const ScalarField& f, const Mask& m) {
    ScalarField out = f;
    out.mask = m;
    for (std::size_t k = 0; k < out.values.size(); ++k)
        if (!m[k]) out.values[k] = 0.0;
    return out;
}

}  // namespace

std::pair<WeierstrassData, WeierstrassData> build_data(const TwoPhaseSolution& sol, const WeierstrassOptions& opt) {
    const GridSpec& g = sol.u.grid;
    const double lam = sol.lambda();
    const bool analytic = opt.analytic && sol.exact_u && sol.exact_grad;
    auto make = [&](int phase) {
        WeierstrassData d;
        d.phase = phase;
        d.f = phase > 0 ? 1.0 / lam : lam;
        d.other = phase > 0 ? sol.lambda_minus : sol.lambda_plus;
        d.flatness = sol.flatness;
        d.hypothesis_ok = sol.flatness <= opt.flatness_threshold;
        const double s = 1.0 / std::sqrt(d.other);
        const Mask& m = phase > 0 ? sol.plus : sol.minus;
        if (analytic) {
            d.v = ScalarField(g, 0.0);
            d.v.mask = m;
            d.g = ComplexField(g);
            d.g.mask = m;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const auto k = g.idx(i, j);
                    if (!m[k]) continue;
                    d.v.values[k] = s * sol.exact_u(phase, g.x(i), g.y(j));
                    const Point2 gr = sol.exact_grad(phase, g.x(i), g.y(j));
                    d.g.re[k] = s * gr.x;
                    d.g.im[k] = -s * gr.y;
                }
        } else {
            d.v = restrict(sol.u, m);
            for (double& x : d.v.values) x *= s;
            d.g = complex_gradient(d.v);
            // window frame: one-sided across an artificial edge
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) d.g.mask[g.idx(i, j)] = 0;
        }
        return d;
    };
    return {make(1), make(-1)};
}

Normals normal_field(const WeierstrassData& d) {
    const GridSpec& g = d.g.grid;
    Normals n{ScalarField(g, 0.0), ScalarField(g, 0.0), ScalarField(g, 0.0)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!d.g.mask[k]) continue;
        const double a = d.g.re[k], b = d.g.im[k], q = a * a + b * b;
        n.x.values[k] = -2.0 * a / (1.0 + q);
        n.y.values[k] = -2.0 * b / (1.0 + q);
        n.z.values[k] = (1.0 - q) / (1.0 + q);
    }
    n.x.mask = n.y.mask = n.z.mask = d.g.mask;
    return n;
}

WeierstrassSurface integrate_surface(const WeierstrassData& d, std::pair<int, int> base,
                                     const WeierstrassOptions& opt) {
    const GridSpec& g = d.g.grid;
    const Mask& m = d.g.mask;
    OneForm w1(g), w2(g), w3(g), a1(g), a2(g);
    w1.mask = w2.mask = w3.mask = a1.mask = a2.mask = m;
    const double f = d.f;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m[k]) continue;
        const cplx G(d.g.re[k], d.g.im[k]);
        // Re(phi dz) = Re(phi) dx - Im(phi) dy
        const cplx p1 = 0.5 * f * (1.0 - G * G);
        const cplx p2 = cplx(0.0, 0.5) * f * (1.0 + G * G);
        const cplx p3 = f * G;
        w1.a[k] = p1.real();
        w1.b[k] = -p1.imag();
        w2.a[k] = p2.real();
        w2.b[k] = -p2.imag();
        w3.a[k] = p3.real();
        w3.b[k] = -p3.imag();
        // real forms in terms of v_x, v_y
        const double vx = d.g.re[k], vy = -d.g.im[k];
        a1.a[k] = f * (0.5 * (1.0 - vx * vx + vy * vy));
        a1.b[k] = -f * vx * vy;
        a2.a[k] = -f * vx * vy;
        a2.b[k] = f * (0.5 * (1.0 + vx * vx - vy * vy));
    }
    auto pot = [&](const OneForm& w) { return integrate_from_spine(w, base); };
    const Potential P1 = pot(w1);
    const Potential P2 = pot(w2);
    const Potential P3 = pot(w3);
    const Potential A1 = pot(a1);
    const Potential A2 = pot(a2);

    WeierstrassSurface s;
    s.phase = d.phase;
    s.base = base;
    s.psi1 = P1.field;
    s.psi2 = P2.field;
    s.psi1_forms = A1.field;
    s.psi2_forms = A2.field;
    // the usual alpha_2 sign convention gives -d psi2
    for (double& x : s.psi2_forms.values) x = -x;
    s.x3 = restrict(d.v, m);
    for (double& x : s.x3.values) x *= f;
    s.x3_integrated = P3.field;
    const double c3 = f * d.v.values[g.idx(base.first, base.second)];
    for (std::size_t k = 0; k < g.size(); ++k)
        if (m[k]) s.x3_integrated.values[k] += c3;
    s.path_residual = std::max({P1.path_residual, P2.path_residual, P3.path_residual, A1.path_residual,
                                A2.path_residual});
    if (count_holes(g, m) > 0 && s.path_residual > opt.period_tol)
        throw InputError("Weierstrass forms have a period of " + std::to_string(s.path_residual));
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m[k]) continue;
        s.x3_discrepancy = std::max(s.x3_discrepancy, std::abs(s.x3.values[k] - s.x3_integrated.values[k]));
        s.route_discrepancy = std::max({s.route_discrepancy, std::abs(s.psi1.values[k] - s.psi1_forms.values[k]),
                                        std::abs(s.psi2.values[k] - s.psi2_forms.values[k])});
    }
    s.nu = normal_field(d);
    return s;
}

std::pair<int, int> common_base(const TwoPhaseSolution& sol) {
    const GridSpec& g = sol.u.grid;
    std::pair<int, int> best{-1, -1};
    double bd = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            if (!sol.plus[k] || !sol.minus[k]) continue;
            const double r = g.x(i) * g.x(i) + g.y(j) * g.y(j);
            if (best.first < 0 || r < bd) {
                best = {i, j};
                bd = r;
            }
        }
    if (best.first >= 0) return best;
    return default_base(g, sol.plus);
}

WeierstrassPair build_weierstrass(const TwoPhaseSolution& sol, const WeierstrassOptions& opt) {
    WeierstrassPair w;
    auto data = build_data(sol, opt);
    w.plus_data = std::move(data.first);
    w.minus_data = std::move(data.second);
    const auto base = common_base(sol);
    auto pick = [&](const WeierstrassData& d) {
        const auto k = d.g.grid.idx(base.first, base.second);
        return d.g.mask[k] ? base : default_base(d.g.grid, d.g.mask);
    };
    w.plus = integrate_surface(w.plus_data, pick(w.plus_data), opt);
    w.minus = integrate_surface(w.minus_data, pick(w.minus_data), opt);
    return w;
}

ScalarField mean_curvature(const WeierstrassSurface& s, const Mask& mask) {
    const GridSpec& g = s.psi1.grid;
    ScalarField H(g, 0.0);
    H.mask.assign(g.size(), 0);
    auto in = [&](int i, int j) { return g.inside(i, j) && mask[g.idx(i, j)]; };
    auto X = [&](int i, int j) {
        const auto k = g.idx(i, j);
        return Vec3{s.psi1.values[k], s.psi2.values[k], s.x3.values[k]};
    };
    for (int j = 1; j + 1 < g.ny; ++j)
        for (int i = 1; i + 1 < g.nx; ++i) {
            bool ok = true;
            for (int dj = -1; dj <= 1 && ok; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if (!in(i + di, j + dj)) ok = false;
            if (!ok) continue;
            const Vec3 p = X(i, j);
            Vec3 lap{0, 0, 0};
            for (int diag = 0; diag < 2; ++diag) {
                Vec3 acc{0, 0, 0};
                double area = 0.0;
                for (int cj = j - 1; cj <= j; ++cj)
                    for (int ci = i - 1; ci <= i; ++ci) {
                        const std::pair<int, int> c00{ci, cj}, c10{ci + 1, cj}, c11{ci + 1, cj + 1},
                            c01{ci, cj + 1};
                        std::pair<int, int> tris[2][3];
                        if (diag == 0) {
                            tris[0][0] = c00, tris[0][1] = c10, tris[0][2] = c11;
                            tris[1][0] = c00, tris[1][1] = c11, tris[1][2] = c01;
                        } else {
                            tris[0][0] = c00, tris[0][1] = c10, tris[0][2] = c01;
                            tris[1][0] = c10, tris[1][1] = c11, tris[1][2] = c01;
                        }
                        for (auto& t : tris) {
                            int at = -1;
                            for (int q = 0; q < 3; ++q)
                                if (t[q].first == i && t[q].second == j) at = q;
                            if (at < 0) continue;
                            const Vec3 b = X(t[(at + 1) % 3].first, t[(at + 1) % 3].second);
                            const Vec3 c = X(t[(at + 2) % 3].first, t[(at + 2) % 3].second);
                            acc = acc + cot(c, p, b) * (b - p) + cot(b, p, c) * (c - p);
                            area += 0.5 * norm(cross(b - p, c - p)) / 3.0;
                        }
                    }
                lap = lap + (0.5 / (2.0 * area)) * acc;
            }
            const auto k = g.idx(i, j);
            const Vec3 n{s.nu.x.values[k], s.nu.y.values[k], s.nu.z.values[k]};
            H.values[k] = 0.5 * dot(lap, n);
            H.mask[k] = 1;
        }
    return H;
}

bool surface_trace(const TwoPhaseSolution& sol, const WeierstrassSurface& s, std::size_t i, double out[3]) {
    int rows[3];
    const int ii = static_cast<int>(i);
    if (!graph_layers(sol, s.phase, ii, rows)) return false;
    const GridSpec& g = s.psi1.grid;
    const ScalarField* comp[3] = {&s.psi1, &s.psi2, &s.x3};
    double ys[3];
    for (int a = 0; a < 3; ++a) {
        if (!s.psi1.active(ii, rows[a])) return false;
        ys[a] = g.y(rows[a]);
    }
    const double eta = sol.graph(s.phase, i);
    for (int c = 0; c < 3; ++c) {
        double vs[3];
        for (int a = 0; a < 3; ++a) vs[a] = (*comp[c])(ii, rows[a]);
        out[c] = quad_extrapolate(ys, vs, eta);
    }
    return true;
}

ResidualReport verify_capillary(const TwoPhaseSolution& sol, const WeierstrassPair& w,
                                const WeierstrassOptions& opt) {
    const GridSpec& g = sol.u.grid;
    const double ctol = opt.contact_tol < 0.0 ? 4.0 * g.h : opt.contact_tol;
    const bool analytic = opt.analytic && sol.exact_grad;
    ResidualReport rep;

    for (const WeierstrassSurface* s : {&w.plus, &w.minus}) {
        const ScalarField H = mean_curvature(*s, erode(g, s->psi1.mask, 1));
        std::vector<double> res;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (H.mask[k]) res.push_back(H.values[k]);
        rep.add(s->phase > 0 ? "mean_curvature_plus" : "mean_curvature_minus", res, opt.tol);
    }

    PhaseGradients grads;
    if (!analytic) grads = phase_gradients(sol);
    const PhaseGradients* gp = analytic ? nullptr : &grads;
    const std::vector<int> cls = classify_abscissae(sol, ctol);
    const double lam = sol.lambda();
    std::vector<double> angle[2], sign[2], trans;
    long ex_angle[2] = {0, 0}, ex_sign[2] = {0, 0}, ex_trans = 0;
    for (std::size_t i = 0; i < sol.xs.size(); ++i) {
        const double x = sol.xs[i];
        double e3[2], tgt[2];
        bool ok[2];
        for (int p = 0; p < 2; ++p) {
            const int phase = p == 0 ? 1 : -1;
            const WeierstrassData& d = p == 0 ? w.plus_data : w.minus_data;
            Point2 gr;
            ok[p] = graph_gradient(sol, gp, phase, i, gr);
            double q = gr.x * gr.x + gr.y * gr.y;
            if (analytic && ok[p] && sol.exact_grad_sq) q = sol.exact_grad_sq(phase, x, sol.graph(phase, i));
            q /= d.other;
            const double mu = sol.coefficient(phase, x) / d.other;
            e3[p] = (1.0 - q) / (1.0 + q);
            tgt[p] = (1.0 - mu) / (1.0 + mu);
        }
        if (cls[i] < 0) {
            ++ex_angle[0], ++ex_angle[1], ++ex_sign[0], ++ex_sign[1], ++ex_trans;
            continue;
        }
        for (int p = 0; p < 2; ++p) {
            if (!ok[p]) {
                ++(cls[i] == 0 ? ex_angle[p] : ex_sign[p]);
                continue;
            }
            if (cls[i] == 0)
                angle[p].push_back(e3[p] - tgt[p]);
            else
                sign[p].push_back(std::max(0.0, e3[p] - tgt[p]));
        }
        if (cls[i] == 1) {
            if (ok[0] && ok[1])
                trans.push_back(lam * (1.0 + e3[0]) - (1.0 / lam) * (1.0 + e3[1]));
            else
                ++ex_trans;
        }
    }
    rep.add("boundary_angle_plus", angle[0], opt.tol, ex_angle[0]);
    rep.add("boundary_angle_minus", angle[1], opt.tol, ex_angle[1]);
    rep.add("contact_sign_plus", sign[0], opt.tol, ex_sign[0]);
    rep.add("contact_sign_minus", sign[1], opt.tol, ex_sign[1]);
    rep.add("transmission", trans, opt.tol, ex_trans);
    if (!w.plus_data.hypothesis_ok)
        rep.warnings().push_back("flatness " + std::to_string(sol.flatness) + " above threshold " +
                                 std::to_string(opt.flatness_threshold));
    return rep;
}

ResidualReport verify_boundary_transform(const TwoPhaseSolution& sol, const WeierstrassPair& w,
                                         const WeierstrassOptions& opt) {
    const GridSpec& g = sol.u.grid;
    const double ctol = opt.contact_tol < 0.0 ? 4.0 * g.h : opt.contact_tol;
    const std::vector<int> cls = classify_abscissae(sol, ctol);
    const std::size_t n = sol.xs.size();
    ResidualReport rep;

    std::vector<double> match;
    long ex_match = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] != 1) continue;
        double a[3], b[3];
        if (!surface_trace(sol, w.plus, i, a) || !surface_trace(sol, w.minus, i, b)) {
            ++ex_match;
            continue;
        }
        match.push_back(std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])}));
    }
    rep.add("contact_match", match, opt.tol, ex_match);

    const double lam = sol.lambda();
    double linear = 0.0;
    for (const WeierstrassSurface* s : {&w.plus, &w.minus}) {
        const WeierstrassData& d = s->phase > 0 ? w.plus_data : w.minus_data;
        std::vector<double> tr(n * 3);
        std::vector<char> ok(n, 0);
        for (std::size_t i = 0; i < n; ++i) ok[i] = surface_trace(sol, *s, i, &tr[3 * i]);
        std::vector<double> speed, x3;
        long ex_speed = 0, ex_x3 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ok[i])
                x3.push_back(tr[3 * i + 2]);
            else
                ++ex_x3;
            if (cls[i] != 0) continue;
            if (i == 0 || i + 1 == n || cls[i - 1] != 0 || cls[i + 1] != 0 || !ok[i - 1] || !ok[i + 1]) {
                ++ex_speed;
                continue;
            }
            const double dx = sol.xs[i + 1] - sol.xs[i - 1];
            const double dy = sol.graph(s->phase, i + 1) - sol.graph(s->phase, i - 1);
            const double ds = std::hypot(dx, dy);
            const cplx tau(dx / ds, dy / ds);
            const cplx dpsi(tr[3 * (i + 1)] - tr[3 * (i - 1)], tr[3 * (i + 1) + 1] - tr[3 * (i - 1) + 1]);
            const double mu = sol.coefficient(s->phase, sol.xs[i]) / d.other;
            const double c = 0.5 * d.f * (1.0 + mu);
            speed.push_back(std::abs(dpsi / ds - c * std::conj(tau)));
            if (s->phase > 0)
                linear = std::max(linear, std::abs(dpsi / ds - (1.0 + lam) / (2.0 * lam) * std::conj(tau)));
        }
        rep.add(s->phase > 0 ? "boundary_speed_plus" : "boundary_speed_minus", speed, opt.tol, ex_speed);
        rep.add(s->phase > 0 ? "boundary_height_plus" : "boundary_height_minus", x3, opt.tol, ex_x3);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", linear);
    rep.meta()["speed_residual_factor_1_plus_lambda"] = buf;
    return rep;
}

ScalarField conformality_defect(const WeierstrassSurface& s) {
    const Gradient a = gradient(s.psi1), b = gradient(s.psi2), c = gradient(s.x3);
    const GridSpec& g = s.psi1.grid;
    ScalarField out(g, 0.0);
    out.mask = mask_and(mask_and(a.gx.mask, b.gx.mask), mask_and(c.gx.mask, mask_and(a.gy.mask, mask_and(b.gy.mask, c.gy.mask))));
    // the outer rings carry one-sided gradient error of g
    out.mask = mask_and(out.mask, erode(g, s.psi1.mask, 2));
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!out.mask[k]) continue;
        const Vec3 px{a.gx.values[k], b.gx.values[k], c.gx.values[k]};
        const Vec3 py{a.gy.values[k], b.gy.values[k], c.gy.values[k]};
        out.values[k] = std::abs(norm(px) - norm(py)) + std::abs(dot(px, py));
    }
    return out;
}

}  // namespace fbw
