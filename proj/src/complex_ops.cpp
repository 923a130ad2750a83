#include "fbw/complex_ops.hpp"

#include <algorithm>
#include <cmath>

#include "fbw/kernels.hpp"
#include "fbw/stencil.hpp"

namespace fbw {

ComplexField complex_gradient(const ScalarField& v) {
    auto grad = gradient(v);
    ComplexField g(v.grid);
    g.mask = mask_and(grad.gx.mask, grad.gy.mask);
    if (std::none_of(g.mask.begin(), g.mask.end(), [](auto m) { return m != 0; }))
        throw InputError("mask too thin for any gradient stencil");
    for (std::size_t k = 0; k < g.re.size(); ++k) {
        if (!g.mask[k]) continue;
        g.re[k] = grad.gx.values[k];
        g.im[k] = -grad.gy.values[k];
    }
    return g;
}

ScalarField cauchy_riemann_residual(const ComplexField& F) {
    ScalarField re{F.grid}, im{F.grid};
    re.values = F.re;
    re.mask = F.mask;
    im.values = F.im;
    im.mask = F.mask;
    auto rx = diff_x(re), ry = diff_y(re), ix = diff_x(im), iy = diff_y(im);
    ScalarField out(F.grid);
    out.mask = mask_and(mask_and(rx.field.mask, ry.field.mask), mask_and(ix.field.mask, iy.field.mask));
    kernels::active().cr_residual(rx.field.values.data(), ry.field.values.data(), ix.field.values.data(),
                                  iy.field.values.data(), out.values.data(), out.values.size());
    for (std::size_t k = 0; k < out.values.size(); ++k)
        if (!out.mask[k]) out.values[k] = 0.0;
    return out;
}

std::pair<int, int> default_base(const GridSpec& g, const Mask& m) { return nearest_active(g, m, 0.0, 0.0); }

namespace {

struct Sweep {
    const OneForm& w;
    std::vector<double> P;
    Mask filled;

    explicit Sweep(const OneForm& form) : w(form), P(form.grid.size(), 0.0), filled(form.grid.size(), 0) {}

    const GridSpec& g() const { return w.grid; }

    bool try_fill(int i, int j, int ni, int nj) {
        const auto& G = g();
        if (!G.inside(ni, nj)) return false;
        const auto k = G.idx(i, j), nk = G.idx(ni, nj);
        if (!filled[k] || filled[nk] || !w.mask[nk]) return false;
        const double half = 0.5 * G.h;
        if (ni != i)
            P[nk] = P[k] + (ni - i) * half * (w.a[k] + w.a[nk]);
        else
            P[nk] = P[k] + (nj - j) * half * (w.b[k] + w.b[nk]);
        filled[nk] = 1;
        return true;
    }

    bool horizontal_pass() {
        bool changed = false;
        const auto& G = g();
        for (int j = 0; j < G.ny; ++j) {
            for (int i = 0; i + 1 < G.nx; ++i) changed |= try_fill(i, j, i + 1, j);
            for (int i = G.nx - 1; i > 0; --i) changed |= try_fill(i, j, i - 1, j);
        }
        return changed;
    }

    bool vertical_pass() {
        bool changed = false;
        const auto& G = g();
        for (int i = 0; i < G.nx; ++i) {
            for (int j = 0; j + 1 < G.ny; ++j) changed |= try_fill(i, j, i, j + 1);
            for (int j = G.ny - 1; j > 0; --j) changed |= try_fill(i, j, i, j - 1);
        }
        return changed;
    }

    void run(std::pair<int, int> base, bool rows_first) {
        const auto& G = g();
        filled[G.idx(base.first, base.second)] = 1;
        const auto [bi, bj] = base;
        if (rows_first) {
            for (int i = bi; i + 1 < G.nx && try_fill(i, bj, i + 1, bj); ++i) {}
            for (int i = bi; i > 0 && try_fill(i, bj, i - 1, bj); --i) {}
        } else {
            for (int j = bj; j + 1 < G.ny && try_fill(bi, j, bi, j + 1); ++j) {}
            for (int j = bj; j > 0 && try_fill(bi, j, bi, j - 1); --j) {}
        }
        for (;;) {
            bool changed = rows_first ? vertical_pass() : horizontal_pass();
            changed |= rows_first ? horizontal_pass() : vertical_pass();
            if (!changed) break;
        }
    }
};

}  // namespace

Potential integrate_potential(const OneForm& w, std::pair<int, int> base) {
    const auto& g = w.grid;
    if (!w.active(base.first, base.second)) throw InputError("integration base point outside the mask");
    Sweep a(w), b(w);
    a.run(base, true);
    b.run(base, false);
    Potential out;
    out.base = base;
    out.field.grid = g;
    out.field.values = std::move(a.P);
    out.field.mask = a.filled;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (out.field.mask[k] && b.filled[k])
            out.path_residual = std::max(out.path_residual, std::abs(out.field.values[k] - b.P[k]));
    return out;
}

Potential integrate_from_spine(const OneForm& w, std::pair<int, int> base) {
    const auto& g = w.grid;
    if (!w.active(base.first, base.second)) throw InputError("integration base point outside the mask");
    // widest row counted two layers inside, away from one-sided stencils
    const Mask inner = erode(g, w.mask, 2);
    std::vector<int> width(g.ny, 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) width[j] += inner[g.idx(i, j)];
    const int count = *std::max_element(width.begin(), width.end());
    std::vector<int> widest;
    for (int j = 0; j < g.ny; ++j)
        if (width[j] == count) widest.push_back(j);
    // middle of the widest band, away from the graphs
    const int best = widest[widest.size() / 2];
    if (best == base.second) return integrate_potential(w, base);
    const auto spine = nearest_active(g, [&] {
        Mask row(g.size(), 0);
        for (int i = 0; i < g.nx; ++i) row[g.idx(i, best)] = w.mask[g.idx(i, best)];
        return row;
    }(), g.x(base.first), g.y(best));
    Potential p = integrate_potential(w, spine);
    const auto kb = g.idx(base.first, base.second);
    if (!p.field.mask[kb]) return integrate_potential(w, base);
    const double shift = p.field.values[kb];
    for (std::size_t k = 0; k < g.size(); ++k)
        if (p.field.mask[k]) p.field.values[k] -= shift;
    p.base = base;
    return p;
}

Potential harmonic_conjugate(const ScalarField& v, std::pair<int, int> base, double period_tol) {
    auto grad = gradient(v);
    OneForm w(v.grid);
    w.mask = mask_and(grad.gx.mask, grad.gy.mask);
    for (std::size_t k = 0; k < w.a.size(); ++k) {
        w.a[k] = grad.gy.values[k];
        w.b[k] = -grad.gx.values[k];
    }
    auto pot = integrate_potential(w, base);
    if (count_holes(v.grid, w.mask) > 0 && pot.path_residual > period_tol)
        throw InputError("harmonic conjugate is multivalued: period " + std::to_string(pot.path_residual));
    return pot;
}

bool bilinear(const GridSpec& g, const std::vector<double>& v, const Mask& m, double x, double y, double& out) {
    const double fx = (x - g.x0) / g.h, fy = (y - g.y0) / g.h;
    const double tol = 1e-9;
    if (fx < -tol || fy < -tol || fx > g.nx - 1 + tol || fy > g.ny - 1 + tol) return false;
    int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
    const double tx = std::clamp(fx - i, 0.0, 1.0), ty = std::clamp(fy - j, 0.0, 1.0);
    const auto k00 = g.idx(i, j), k10 = g.idx(i + 1, j), k01 = g.idx(i, j + 1), k11 = g.idx(i + 1, j + 1);
    // Corners with zero weight may sit outside the mask.
    auto need = [&](std::size_t k, double wgt) { return wgt == 0.0 || m[k] != 0; };
    if (!need(k00, (1 - tx) * (1 - ty)) || !need(k10, tx * (1 - ty)) || !need(k01, (1 - tx) * ty) ||
        !need(k11, tx * ty))
        return false;
    auto val = [&](std::size_t k) { return m[k] ? v[k] : 0.0; };
    out = (1 - ty) * ((1 - tx) * val(k00) + tx * val(k10)) + ty * ((1 - tx) * val(k01) + tx * val(k11));
    return true;
}

double integrate_form(const OneForm& w, const std::vector<Point2>& path) {
    const auto& g = w.grid;
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        const Point2 p = path[s], q = path[s + 1];
        const double len = std::hypot(q.x - p.x, q.y - p.y);
        if (len == 0.0) continue;
        const int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * g.h))));
        const double tx = (q.x - p.x) / len, ty = (q.y - p.y) / len;
        double prev = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const double x = p.x + t * (q.x - p.x), y = p.y + t * (q.y - p.y);
            double a = 0.0, b = 0.0;
            if (!bilinear(g, w.a, w.mask, x, y, a) || !bilinear(g, w.b, w.mask, x, y, b))
                throw InputError("integration path leaves the form's mask");
            const double f = a * tx + b * ty;
            if (k > 0) total += 0.5 * (prev + f) * (len / n);
            prev = f;
        }
    }
    return total;
}

}  // namespace fbw
