#include "fbw/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbw/complex_ops.hpp"
#include "fbw/harmonic.hpp"
#include "fbw/stencil.hpp"

namespace fbw {
namespace {

constexpr double kClamp = -1e-300;
// exp(-x) drops below 1e-300 past this exponent
constexpr double kUnderflow = 690.0;

double dist_to(const IntervalUnion& K, double x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : K.parts()) {
        if (x >= a && x <= b) return 0.0;
        d = std::min({d, std::abs(x - a), std::abs(x - b)});
    }
    return d;
}

// K up to the accuracy of the 1D preimage solve
bool on_K(const IntervalUnion& K, double x) { return dist_to(K, x) <= 1e-10; }

}  // namespace

IntervalUnion::IntervalUnion(std::vector<std::pair<double, double>> parts) {
    for (const auto& [a, b] : parts) {
        if (!std::isfinite(a) || !std::isfinite(b) || a > b)
            throw InputError("interval endpoints must be finite with a <= b");
        if (a < -1.0 || b > 1.0) throw InputError("K must lie in [-1, 1]");
    }
    std::sort(parts.begin(), parts.end());
    for (const auto& p : parts) {
        if (!parts_.empty() && p.first <= parts_.back().second)
            parts_.back().second = std::max(parts_.back().second, p.second);
        else
            parts_.push_back(p);
    }
}

bool IntervalUnion::contains(double x) const {
    for (const auto& [a, b] : parts_)
        if (x >= a && x <= b) return true;
    return false;
}

std::vector<double> IntervalUnion::boundary() const {
    std::vector<double> out;
    for (const auto& [a, b] : parts_) {
        if (a > -1.0 && a < 1.0) out.push_back(a);
        if (b > a && b > -1.0 && b < 1.0) out.push_back(b);
    }
    return out;
}

std::vector<std::pair<double, double>> IntervalUnion::complement() const {
    std::vector<std::pair<double, double>> out;
    double left = -1.0;
    for (const auto& [a, b] : parts_) {
        if (a > left) out.emplace_back(left, a);
        left = b;
    }
    if (left < 1.0) out.emplace_back(left, 1.0);
    return out;
}

double flat_value(const IntervalUnion& K, double x) {
    if (K.empty()) throw InputError("K must be nonempty");
    if (K.contains(x)) return 0.0;
    double e;
    if (x < K.lo()) {
        if (K.lo() <= -1.0) return 0.0;
        e = 1.0 / ((K.lo() - x) * (K.lo() - x));
    } else if (x > K.hi()) {
        if (K.hi() >= 1.0) return 0.0;
        e = 1.0 / ((x - K.hi()) * (x - K.hi()));
    } else {
        double a = K.lo(), b = K.hi();
        for (std::size_t k = 0; k + 1 < K.parts().size(); ++k)
            if (x > K.parts()[k].second && x < K.parts()[k + 1].first) {
                a = K.parts()[k].second;
                b = K.parts()[k + 1].first;
            }
        e = 1.0 / ((x - a) * (x - a)) + 1.0 / ((b - x) * (b - x));
    }
    return e > kUnderflow ? kClamp : -std::exp(-e);
}

FlatProfile build_f(const IntervalUnion& K, const std::vector<double>& xs) {
    FlatProfile p;
    p.xs = xs;
    p.f.resize(xs.size());
    p.clamp_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        p.f[i] = flat_value(K, xs[i]);
        if (p.f[i] == kClamp) {
            ++p.clamped;
            p.clamp_distance = std::min(p.clamp_distance, dist_to(K, xs[i]));
        }
    }
    if (!p.clamped) p.clamp_distance = 0.0;
    if (K.complement().empty()) p.warnings.push_back("K covers [-1, 1]: f vanishes identically");
    return p;
}

HalfBundle build_half_bundle(const IntervalUnion& K, double h, const CounterexampleOptions& opt) {
    if (K.empty()) throw InputError("K must be nonempty");
    if (!(opt.height > 0.0) || !(opt.pad > 0.0)) throw InputError("window height and padding must be positive");
    HalfBundle b;
    b.K = K;
    const double xa = K.lo() - opt.pad, xb = K.hi() + opt.pad;
    const GridSpec row = GridSpec::covering(xa, xb, 0.0, opt.height, h);
    double fmin = 0.0, mean = 0.0;
    for (int i = 0; i < row.nx; ++i) {
        const double v = flat_value(K, row.x(i));
        fmin = std::min(fmin, v);
        mean += v;
    }
    mean /= row.nx;
    const GridSpec g = GridSpec::covering(xa, xb, fmin - h, opt.height, h);
    b.grid = g;
    b.f.resize(g.nx);
    for (int i = 0; i < g.nx; ++i) b.f[i] = flat_value(K, g.x(i));
    const double top = g.y1();
    b.top_value = top - mean;

    CutDomain dom;
    dom.grid = g;
    dom.level = [&K](double x, double y) { return y - flat_value(K, x); };
    dom.value = [&K, top, mean](double x, double y) {
        const double f = flat_value(K, x);
        if (y - f <= 0.0) return 0.0;
        return (y - f) * (top - mean) / (top - f);
    };
    dom.cut_value = [](double, double) { return 0.0; };
    const HarmonicSolution hs = solve_dirichlet_harmonic(dom);
    b.v = hs.field;
    b.sweeps = hs.sweeps;

    const auto base = default_base(g, b.v.mask);
    b.vbar = harmonic_conjugate(b.v, base).field;

    ComplexField F(g);
    F.re = b.vbar.values;
    F.im = b.v.values;
    F.mask = mask_and(b.v.mask, b.vbar.mask);
    const ScalarField cr = cauchy_riemann_residual(F);
    const Mask inner = erode(g, F.mask, 2);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (cr.mask[k] && inner[k]) b.cr_residual = std::max(b.cr_residual, cr.values[k]);

    const Gradient gv = gradient(b.v);
    const std::size_t n = g.size();
    std::vector<double> sx(n, 0.0), sy(n, 0.0), tx(n, 0.0), ty(n, 0.0);
    Mask m = mask_and(F.mask, mask_and(gv.gx.mask, gv.gy.mask));
    for (std::size_t k = 0; k < n; ++k) {
        if (!m[k]) continue;
        sx[k] = gv.gy.values[k];
        sy[k] = -gv.gx.values[k];
        tx[k] = gv.gx.values[k];
        ty[k] = gv.gy.values[k];
    }
    ChartOptions co;
    co.j_min = 1e-4;
    b.psi = make_chart(g, m, b.vbar.values, b.v.values, sx, sy, tx, ty, co);

    // Hopf floor on the part of the boundary y = f(x) away from the side edges
    b.hopf_min = std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < g.nx; ++i) {
        HermiteField::Value t;
        if (!b.psi.ht.eval_near(g.x(i), b.f[i], t, 2)) continue;
        b.hopf_min = std::min(b.hopf_min, std::hypot(t.fx, t.fy));
    }
    if (!(b.hopf_min > opt.hopf_floor))
        throw InputError("window too large: min |grad v| on the boundary is " + std::to_string(b.hopf_min) +
                         " (floor " + std::to_string(opt.hopf_floor) + ")");
    return b;
}

double psi_preimage_x(const HalfBundle& b, double s) {
    const GridSpec& g = b.grid;
    double lo = g.x0, hi = g.x1();
    HermiteField::Value a, c;
    if (!b.psi.hs.eval_near(lo, 0.0, a, 2) || !b.psi.hs.eval_near(hi, 0.0, c, 2))
        return std::numeric_limits<double>::quiet_NaN();
    if (s < a.f || s > c.f) return std::numeric_limits<double>::quiet_NaN();
    double x = lo + (s - a.f) / (c.f - a.f) * (hi - lo);
    for (int it = 0; it < 80; ++it) {
        HermiteField::Value v;
        if (!b.psi.hs.eval_near(x, 0.0, v, 2)) return std::numeric_limits<double>::quiet_NaN();
        const double F = v.f - s;
        if (std::abs(F) <= 1e-15 * (1.0 + std::abs(s))) break;
        (F < 0.0 ? lo : hi) = x;
        double xn = v.fx > 0.0 ? x - F / v.fx : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (hi - lo <= 1e-16 * (1.0 + std::abs(x))) break;
        x = xn;
    }
    return x;
}

bool v_on_axis(const HalfBundle& b, double x, double& v, Point2& grad) {
    HermiteField::Value t;
    if (!b.psi.ht.eval_near(x, 0.0, t, 2)) return false;
    v = t.f;
    grad = Point2{t.fx, t.fy};
    return true;
}

namespace {

// Height of the upper free boundary over preimage abscissa x: zero on K,
// first order in f where the boundary is closer than h^2 to the axis.
double eta_at(const HalfBundle& b, double x) {
    if (on_K(b.K, x)) return 0.0;
    double v;
    Point2 gr;
    if (!v_on_axis(b, x, v, gr)) return std::numeric_limits<double>::quiet_NaN();
    const double f = flat_value(b.K, x);
    if (-f < b.grid.h * b.grid.h) return -f * gr.y;
    return v;
}

double lambda_at(const HalfBundle& b, double x) {
    double v;
    Point2 gr;
    if (!v_on_axis(b, x, v, gr)) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 / (gr.x * gr.x + gr.y * gr.y);
}

}  // namespace

std::pair<CounterexampleBundle, TwoPhaseSolution> assemble_counterexample(const IntervalUnion& K, double h,
                                                                          const CounterexampleOptions& opt) {
    CounterexampleBundle cb;
    auto hp = std::make_shared<const HalfBundle>(build_half_bundle(K, h, opt));
    cb.half = hp;
    const HalfBundle& hb = *hp;
    const GridSpec& g = hb.grid;

    // (s, t) window inside the image of the upper part of the box
    double slo = -1e300, shi = 1e300;
    for (int j = 0; j < g.ny; ++j) {
        if (g.y(j) < 0.0) continue;
        if (hb.psi.mask[g.idx(0, j)]) slo = std::max(slo, hb.psi.s(0, j));
        if (hb.psi.mask[g.idx(g.nx - 1, j)]) shi = std::min(shi, hb.psi.s(g.nx - 1, j));
    }
    // keeps inverted border data off the sides of the x window
    const double margin = 0.2 * opt.pad;
    slo += 2 * h + margin;
    shi -= 2 * h + margin;
    const int half = static_cast<int>(std::floor((hb.top_value - 2 * h - margin) / h + 1e-9));
    GridSpec st;
    st.h = h;
    st.x0 = std::ceil(slo / h - 1e-9) * h;
    st.nx = static_cast<int>(std::floor((shi - st.x0) / h + 1e-9)) + 1;
    st.y0 = -half * h;
    st.ny = 2 * half + 1;
    if (!(shi > slo) || st.nx < 5 || half < 3) throw InputError("counterexample window too small for h");

    TwoPhaseSolution sol;
    sol.xs.resize(st.nx);
    sol.eta_plus.resize(st.nx);
    sol.eta_minus.resize(st.nx);
    std::vector<double> px(st.nx);
    for (int i = 0; i < st.nx; ++i) {
        sol.xs[i] = st.x(i);
        px[i] = psi_preimage_x(hb, sol.xs[i]);
        sol.eta_plus[i] = eta_at(hb, px[i]);
        sol.eta_minus[i] = -sol.eta_plus[i];
    }
    sol.eta_plus_fn = [hp](double s) { return eta_at(*hp, psi_preimage_x(*hp, s)); };
    sol.eta_minus_fn = [hp](double s) { return -eta_at(*hp, psi_preimage_x(*hp, s)); };
    sol.coef_plus = [hp](double s) { return lambda_at(*hp, psi_preimage_x(*hp, s)); };
    sol.coef_minus = sol.coef_plus;

    const std::size_t n = st.size();
    sol.u = ScalarField(st, 0.0);
    sol.plus.assign(n, 0);
    sol.minus.assign(n, 0);
    cb.lambda_plus = ScalarField(st, 0.0);
    cb.lambda_plus.mask.assign(n, 0);
    std::vector<double> yinv(n, 0.0);
    for (int j = half; j < st.ny; ++j)
        for (int i = 0; i < st.nx; ++i) {
            const auto k = st.idx(i, j);
            const Inverse inv = invert_chart(hb.psi, Point2{st.x(i), st.y(j)});
            HermiteField::Value tv;
            if (!inv.ok || !hb.psi.ht.eval_near(inv.src.x, inv.src.y, tv, 2)) {
                ++cb.flagged;
                continue;
            }
            cb.lambda_plus.values[k] = 1.0 / (tv.fx * tv.fx + tv.fy * tv.fy);
            cb.lambda_plus.mask[k] = 1;
            yinv[k] = inv.src.y;
        }
    if (cb.flagged) throw ConvergenceError("Psi_f inversion failed at " + std::to_string(cb.flagged) + " samples",
                                           static_cast<double>(cb.flagged));

    // w+ is harmonic above the graph with the values of y o Psi^-1 on the window border
    GridSpec upper = st;
    upper.y0 = 0.0;
    upper.ny = half + 1;
    CutDomain dom;
    dom.grid = upper;
    dom.level = [&sol](double s, double t) { return t - sol.eta_plus_fn(s); };
    dom.value = [&](double s, double t) {
        if (dom.level(s, t) <= 0.0) return 0.0;
        const int i = static_cast<int>(std::lround((s - st.x0) / h));
        const int j = static_cast<int>(std::lround(t / h)) + half;
        return std::max(0.0, yinv[st.idx(i, j)]);
    };
    dom.cut_value = [](double, double) { return 0.0; };
    const HarmonicSolution wp = solve_dirichlet_harmonic(dom);
    for (int j = 0; j <= half; ++j)
        for (int i = 0; i < st.nx; ++i) {
            const auto ku = upper.idx(i, j), k = st.idx(i, j + half);
            if (!wp.field.mask[ku]) continue;
            sol.plus[k] = 1;
            sol.u.values[k] = wp.field.values[ku];
            cb.inversion_discrepancy = std::max(cb.inversion_discrepancy, std::abs(sol.u.values[k] - std::max(0.0, yinv[k])));
        }
    // odd reflection
    cb.lambda_minus = ScalarField(st, 0.0);
    cb.lambda_minus.mask.assign(n, 0);
    for (int j = 0; j <= half; ++j)
        for (int i = 0; i < st.nx; ++i) {
            const auto up = st.idx(i, 2 * half - j), k = st.idx(i, j);
            cb.lambda_minus.values[k] = cb.lambda_plus.values[up];
            cb.lambda_minus.mask[k] = cb.lambda_plus.mask[up];
            if (sol.plus[up]) {
                sol.minus[k] = 1;
                if (j != half) sol.u.values[k] = -sol.u.values[up];
            }
        }
    cb.w_plus = ScalarField(st, 0.0);
    cb.w_minus = ScalarField(st, 0.0);
    cb.w_plus.mask = sol.plus;
    cb.w_minus.mask = sol.minus;
    for (std::size_t k = 0; k < n; ++k) {
        if (sol.plus[k]) cb.w_plus.values[k] = sol.u.values[k];
        if (sol.minus[k]) cb.w_minus.values[k] = sol.u.values[k];
    }
    for (int j = 0; j < st.ny; ++j)
        for (int i = 0; i < st.nx; ++i) {
            const int jr = 2 * half - j;
            if (cb.w_minus.active(i, j) && cb.w_plus.active(i, jr))
                cb.oddness = std::max(cb.oddness, std::abs(cb.w_minus(i, j) + cb.w_plus(i, jr)));
        }
    for (int i = 0; i < st.nx; ++i)
        if (cb.lambda_plus.active(i, half) && cb.lambda_minus.active(i, half))
            cb.trace_agreement =
                std::max(cb.trace_agreement, std::abs(cb.lambda_plus(i, half) - cb.lambda_minus(i, half)));

    // reference constants at the shared base point
    const auto base = common_base(sol);
    const double lref = sol.coef_plus(st.x(base.first));
    sol.lambda_plus = sol.lambda_minus = lref;
    sol.flatness = flatness(sol.u, lref, lref);
    return {std::move(cb), std::move(sol)};
}

BranchingVerdict verify_branching_prescription(const CounterexampleBundle& b, const TwoPhaseSolution& sol) {
    BranchingVerdict v;
    v.h = sol.u.grid.h;
    const BranchingSet bs = branching_set(sol, 0.0);
    for (double s : bs.points) v.measured.push_back(psi_preimage_x(*b.half, s));
    const double xa = b.half->grid.x0, xb = b.half->grid.x1();
    for (double p : b.half->K.boundary())
        if (p > xa && p < xb) v.expected.push_back(p);
    auto one_sided = [](const std::vector<double>& from, const std::vector<double>& to) {
        double d = 0.0;
        for (double p : from) {
            double m = std::numeric_limits<double>::infinity();
            for (double q : to) m = std::min(m, std::abs(p - q));
            d = std::max(d, m);
        }
        return d;
    };
    v.hausdorff = std::max(one_sided(v.measured, v.expected), one_sided(v.expected, v.measured));
    v.pass = v.hausdorff <= 4.0 * v.h && v.measured.size() == v.expected.size();
    return v;
}

}  // namespace fbw
