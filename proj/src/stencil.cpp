#include "fbw/stencil.hpp"

#include "fbw/kernels.hpp"

namespace fbw {
namespace {

// Which way a second-order stencil fits along one axis.
enum class Fit { None, Central, Forward, Backward };

template <class Active>
Fit fit_along(Active&& act, int k, int need_span) {
    if (!act(k)) return Fit::None;
    if (act(k - 1) && act(k + 1)) return Fit::Central;
    bool fwd = true, bwd = true;
    for (int s = 1; s <= need_span; ++s) {
        fwd = fwd && act(k + s);
        bwd = bwd && act(k - s);
    }
    if (fwd) return Fit::Forward;
    if (bwd) return Fit::Backward;
    return Fit::None;
}

// First derivative along an axis; `stride` steps one sample along it.
Derivative first_derivative(const ScalarField& f, bool along_x) {
    const GridSpec& g = f.grid;
    Derivative out{ScalarField(g), Mask(g.size(), 0)};
    out.field.mask.assign(g.size(), 0);
    const auto& K = kernels::active();
    const double inv2h = 1.0 / (2.0 * g.h);
    const double* v = f.values.data();
    double* o = out.field.values.data();

    if (along_x) {
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t row = g.idx(0, j);
            K.central_diff(v + row, v + row + 2, inv2h, o + row + 1, static_cast<std::size_t>(g.nx - 2));
        }
    } else {
        for (int j = 1; j + 1 < g.ny; ++j)
            K.central_diff(v + g.idx(0, j - 1), v + g.idx(0, j + 1), inv2h, o + g.idx(0, j),
                           static_cast<std::size_t>(g.nx));
    }

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            auto val = [&](int s) { return along_x ? f(i + s, j) : f(i, j + s); };
            auto act = [&](int kk) { return along_x ? f.active(kk, j) : f.active(i, kk); };
            const Fit fit = fit_along(act, along_x ? i : j, 2);
            switch (fit) {
                case Fit::None:
                    o[k] = 0.0;
                    break;
                case Fit::Central:
                    out.field.mask[k] = 1;
                    break;
                case Fit::Forward:
                    o[k] = (-3.0 * val(0) + 4.0 * val(1) - val(2)) * inv2h;
                    out.field.mask[k] = 1;
                    out.onesided[k] = 1;
                    break;
                case Fit::Backward:
                    o[k] = (3.0 * val(0) - 4.0 * val(-1) + val(-2)) * inv2h;
                    out.field.mask[k] = 1;
                    out.onesided[k] = 1;
                    break;
            }
        }
    }
    return out;
}

Derivative second_derivative(const ScalarField& f, bool along_x) {
    const GridSpec& g = f.grid;
    Derivative out{ScalarField(g), Mask(g.size(), 0)};
    out.field.mask.assign(g.size(), 0);
    const double ih2 = 1.0 / (g.h * g.h);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            auto val = [&](int s) { return along_x ? f(i + s, j) : f(i, j + s); };
            auto act = [&](int kk) { return along_x ? f.active(kk, j) : f.active(i, kk); };
            const Fit fit = fit_along(act, along_x ? i : j, 3);
            double d = 0.0;
            switch (fit) {
                case Fit::None:
                    continue;
                case Fit::Central:
                    d = (val(-1) - 2.0 * val(0) + val(1)) * ih2;
                    break;
                case Fit::Forward:
                    d = (2.0 * val(0) - 5.0 * val(1) + 4.0 * val(2) - val(3)) * ih2;
                    out.onesided[k] = 1;
                    break;
                case Fit::Backward:
                    d = (2.0 * val(0) - 5.0 * val(-1) + 4.0 * val(-2) - val(-3)) * ih2;
                    out.onesided[k] = 1;
                    break;
            }
            out.field.values[k] = d;
            out.field.mask[k] = 1;
        }
    }
    return out;
}

}  // namespace

Derivative diff_x(const ScalarField& f) { return first_derivative(f, true); }
Derivative diff_y(const ScalarField& f) { return first_derivative(f, false); }
Derivative diff_xx(const ScalarField& f) { return second_derivative(f, true); }
Derivative diff_yy(const ScalarField& f) { return second_derivative(f, false); }

ScalarField laplacian5(const ScalarField& f) {
    const GridSpec& g = f.grid;
    ScalarField out(g);
    out.mask.assign(g.size(), 0);
    const auto& K = kernels::active();
    const double ih2 = 1.0 / (g.h * g.h);
    const double* v = f.values.data();
    for (int j = 1; j + 1 < g.ny; ++j) {
        const std::size_t c = g.idx(1, j);
        K.laplace5(v + c - 1, v + c + 1, v + g.idx(1, j - 1), v + g.idx(1, j + 1), v + c, ih2,
                   out.values.data() + c, static_cast<std::size_t>(g.nx - 2));
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            const bool full = f.active(i, j) && f.active(i - 1, j) && f.active(i + 1, j) && f.active(i, j - 1) &&
                              f.active(i, j + 1);
            out.mask[k] = full ? 1 : 0;
            if (!full) out.values[k] = 0.0;
        }
    }
    return out;
}

Gradient gradient(const ScalarField& f) {
    auto dx = diff_x(f);
    auto dy = diff_y(f);
    Gradient g{std::move(dx.field), std::move(dy.field), mask_or(dx.onesided, dy.onesided)};
    return g;
}

Hessian hessian(const ScalarField& f) {
    auto xx = diff_xx(f);
    auto yy = diff_yy(f);
    auto dx = diff_x(f);
    auto xy = diff_y(dx.field);
    Mask one = mask_or(mask_or(xx.onesided, yy.onesided), mask_or(dx.onesided, xy.onesided));
    return Hessian{std::move(xx.field), std::move(xy.field), std::move(yy.field), std::move(one)};
}

Mask mask_and(const Mask& a, const Mask& b) {
    Mask m(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) m[k] = (a[k] && b[k]) ? 1 : 0;
    return m;
}

Mask mask_or(const Mask& a, const Mask& b) {
    Mask m(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) m[k] = (a[k] || b[k]) ? 1 : 0;
    return m;
}

Mask erode(const GridSpec& g, const Mask& m, int layers) {
    Mask cur = m;
    for (int l = 0; l < layers; ++l) {
        Mask next(g.size(), 0);
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                bool ok = true;
                for (int dj = -1; dj <= 1 && ok; ++dj)
                    for (int di = -1; di <= 1 && ok; ++di)
                        ok = g.inside(i + di, j + dj) && cur[g.idx(i + di, j + dj)];
                next[g.idx(i, j)] = ok ? 1 : 0;
            }
        }
        cur.swap(next);
    }
    return cur;
}

}  // namespace fbw
