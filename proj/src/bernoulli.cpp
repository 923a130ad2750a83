#include "fbw/bernoulli.hpp"

#include <algorithm>
#include <cmath>

#include "fbw/harmonic.hpp"

namespace fbw {
namespace {

std::vector<double> abscissae(const GridSpec& g) {
    std::vector<double> xs(g.nx);
    for (int i = 0; i < g.nx; ++i) xs[i] = g.x(i);
    return xs;
}

}  // namespace

bool graph_layers(const TwoPhaseSolution& sol, int phase, int i, int rows[3]) {
    const GridSpec& g = sol.u.grid;
    const double eta = sol.graph(phase, i);
    int found = 0;
    if (phase > 0) {
        for (int j = 0; j < g.ny && found < 3; ++j)
            if (g.y(j) > eta) rows[found++] = j;
    } else {
        for (int j = g.ny - 1; j >= 0 && found < 3; --j)
            if (g.y(j) < eta) rows[found++] = j;
    }
    return found == 3;
}

double quad_extrapolate(const double ys[3], const double vs[3], double y) {
    double out = 0.0;
    for (int a = 0; a < 3; ++a) {
        double w = 1.0;
        for (int b = 0; b < 3; ++b)
            if (b != a) w *= (y - ys[b]) / (ys[a] - ys[b]);
        out += w * vs[a];
    }
    return out;
}

double TwoPhaseSolution::lambda() const { return std::sqrt(lambda_plus / lambda_minus); }

double TwoPhaseSolution::coefficient(int phase, double x) const {
    if (phase > 0) return coef_plus ? coef_plus(x) : lambda_plus;
    return coef_minus ? coef_minus(x) : lambda_minus;
}

ScalarField TwoPhaseSolution::phase_field(int phase) const {
    ScalarField f = u;
    f.mask = phase > 0 ? plus : minus;
    return f;
}

TwoPhaseSolution make_two_plane(double lambda_plus, double lambda_minus, const GridSpec& grid) {
    if (!(lambda_plus > 0.0) || !(lambda_minus > 0.0)) throw InputError("free-boundary constants must be positive");
    grid.validate();
    TwoPhaseSolution s;
    s.lambda_plus = lambda_plus;
    s.lambda_minus = lambda_minus;
    const double ap = std::sqrt(lambda_plus), am = std::sqrt(lambda_minus);
    s.u = ScalarField::sample(grid, [=](double, double y) { return y >= 0.0 ? ap * y : am * y; });
    s.plus.assign(grid.size(), 0);
    s.minus.assign(grid.size(), 0);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            s.plus[grid.idx(i, j)] = grid.y(j) >= 0.0;
            s.minus[grid.idx(i, j)] = grid.y(j) <= 0.0;
        }
    s.xs = abscissae(grid);
    s.eta_plus.assign(grid.nx, 0.0);
    s.eta_minus.assign(grid.nx, 0.0);
    s.eta_plus_fn = [](double) { return 0.0; };
    s.eta_minus_fn = [](double) { return 0.0; };
    s.exact_u = [=](int phase, double, double y) { return (phase > 0 ? ap : am) * y; };
    s.exact_grad = [=](int phase, double, double) { return Point2{0.0, phase > 0 ? ap : am}; };
    s.exact_laplacian = [](int, double, double) { return 0.0; };
    s.exact_grad_sq = [=](int phase, double, double) { return phase > 0 ? lambda_plus : lambda_minus; };
    s.flatness = 0.0;
    return s;
}

TwoPhaseSolution assemble_from_graphs(const GridSpec& grid, const Fn1& eta_plus, const Fn1& eta_minus,
                                      double lambda_plus, double lambda_minus, const Fn2& outer) {
    if (!(lambda_plus > 0.0) || !(lambda_minus > 0.0)) throw InputError("free-boundary constants must be positive");
    grid.validate();
    TwoPhaseSolution s;
    s.lambda_plus = lambda_plus;
    s.lambda_minus = lambda_minus;
    s.xs = abscissae(grid);
    s.eta_plus.resize(grid.nx);
    s.eta_minus.resize(grid.nx);
    for (int i = 0; i < grid.nx; ++i) {
        s.eta_plus[i] = eta_plus(s.xs[i]);
        s.eta_minus[i] = eta_minus(s.xs[i]);
        if (s.eta_minus[i] > s.eta_plus[i])
            throw InputError("graphs cross at x = " + std::to_string(s.xs[i]));
    }
    s.eta_plus_fn = eta_plus;
    s.eta_minus_fn = eta_minus;

    // Outer data sign on the box border.
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            if (i != 0 && j != 0 && i != grid.nx - 1 && j != grid.ny - 1) continue;
            const double y = grid.y(j), v = outer(grid.x(i), y);
            if ((y > s.eta_plus[i] && !(v > 0.0)) || (y < s.eta_minus[i] && !(v < 0.0)))
                throw InputError("outer data must be positive above and negative below the graphs");
        }

    s.u = ScalarField(grid, 0.0);
    s.plus.assign(grid.size(), 0);
    s.minus.assign(grid.size(), 0);
    for (int phase : {1, -1}) {
        const Fn1& eta = phase > 0 ? eta_plus : eta_minus;
        CutDomain dom;
        dom.grid = grid;
        dom.level = [&eta, phase](double x, double y) { return phase * (y - eta(x)); };
        dom.value = [&](double x, double y) { return dom.level(x, y) == 0.0 ? 0.0 : outer(x, y); };
        dom.cut_value = [](double, double) { return 0.0; };
        const HarmonicSolution h = solve_dirichlet_harmonic(dom);
        Mask& m = phase > 0 ? s.plus : s.minus;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!h.field.mask[k]) continue;
            m[k] = 1;
            s.u.values[k] = h.field.values[k];
        }
    }
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (s.plus[k] && s.minus[k]) s.u.values[k] = 0.0;
    s.flatness = flatness(s.u, lambda_plus, lambda_minus);
    return s;
}

void extract_graphs(const ScalarField& u, std::vector<double>& eta_plus, std::vector<double>& eta_minus) {
    const GridSpec& g = u.grid;
    eta_plus.assign(g.nx, g.y0);
    eta_minus.assign(g.nx, g.y0);
    for (int i = 0; i < g.nx; ++i) {
        double ep = g.y(0), em = g.y(g.ny - 1);
        for (int j = g.ny - 1; j >= 0; --j) {
            if (u(i, j) > 0.0) continue;
            if (j == g.ny - 1) {
                ep = g.y(j);
            } else {
                const double a = u(i, j), b = u(i, j + 1);
                ep = g.y(j) + g.h * (-a / (b - a));
            }
            break;
        }
        for (int j = 0; j < g.ny; ++j) {
            if (u(i, j) < 0.0) continue;
            if (j == 0) {
                em = g.y(j);
            } else {
                const double a = u(i, j - 1), b = u(i, j);
                em = g.y(j - 1) + g.h * (-a / (b - a));
            }
            break;
        }
        eta_plus[i] = ep;
        eta_minus[i] = std::min(em, ep);
    }
}

double flatness(const ScalarField& u, double lambda_plus, double lambda_minus) {
    const double ap = std::sqrt(lambda_plus), am = std::sqrt(lambda_minus);
    double worst = 0.0;
    for (int j = 0; j < u.grid.ny; ++j)
        for (int i = 0; i < u.grid.nx; ++i) {
            if (!u.active(i, j)) continue;
            const double y = u.grid.y(j);
            worst = std::max(worst, std::abs(u(i, j) - (y >= 0.0 ? ap * y : am * y)));
        }
    return worst;
}

PhaseGradients phase_gradients(const TwoPhaseSolution& sol) {
    return PhaseGradients{gradient(sol.phase_field(1)), gradient(sol.phase_field(-1))};
}

bool graph_gradient(const TwoPhaseSolution& sol, const PhaseGradients* grads, int phase, std::size_t i,
                    Point2& grad) {
    const double x = sol.xs[i], eta = sol.graph(phase, i);
    if (!grads) {
        if (!sol.exact_grad) return false;
        grad = sol.exact_grad(phase, x, eta);
        return true;
    }
    const Gradient& G = phase > 0 ? grads->plus : grads->minus;
    int rows[3];
    if (!graph_layers(sol, phase, static_cast<int>(i), rows)) return false;
    double ys[3], gx[3], gy[3];
    for (int a = 0; a < 3; ++a) {
        if (!G.gx.active(static_cast<int>(i), rows[a]) || !G.gy.active(static_cast<int>(i), rows[a])) return false;
        ys[a] = sol.u.grid.y(rows[a]);
        gx[a] = G.gx(static_cast<int>(i), rows[a]);
        gy[a] = G.gy(static_cast<int>(i), rows[a]);
    }
    grad = Point2{quad_extrapolate(ys, gx, eta), quad_extrapolate(ys, gy, eta)};
    return true;
}

bool graph_trace(const TwoPhaseSolution& sol, bool analytic, int phase, std::size_t i, double& value) {
    const double x = sol.xs[i], eta = sol.graph(phase, i);
    if (analytic) {
        if (!sol.exact_u) return false;
        value = sol.exact_u(phase, x, eta);
        return true;
    }
    int rows[3];
    if (!graph_layers(sol, phase, static_cast<int>(i), rows)) return false;
    const Mask& m = phase > 0 ? sol.plus : sol.minus;
    double ys[3], vs[3];
    for (int a = 0; a < 3; ++a) {
        if (!m[sol.u.grid.idx(static_cast<int>(i), rows[a])]) return false;
        ys[a] = sol.u.grid.y(rows[a]);
        vs[a] = sol.u(static_cast<int>(i), rows[a]);
    }
    value = quad_extrapolate(ys, vs, eta);
    return true;
}

std::vector<int> classify_abscissae(const TwoPhaseSolution& sol, double contact_tol) {
    const std::size_t n = sol.xs.size();
    std::vector<int> raw(n), out(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = sol.eta_plus[i] - sol.eta_minus[i] <= contact_tol ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = raw[i];
        if ((i > 0 && raw[i - 1] != raw[i]) || (i + 1 < n && raw[i + 1] != raw[i])) out[i] = -1;
    }
    return out;
}

ResidualReport residuals_two_phase(const TwoPhaseSolution& sol, const TwoPhaseCheckOptions& opt) {
    const GridSpec& g = sol.u.grid;
    const double ctol = opt.contact_tol < 0.0 ? 4.0 * g.h : opt.contact_tol;
    const bool analytic = opt.analytic && sol.exact_u && sol.exact_grad && sol.exact_laplacian;
    ResidualReport rep;

    // (a) interior Laplacians
    for (int phase : {1, -1}) {
        std::vector<double> res;
        long skipped = 0;
        const ScalarField pf = sol.phase_field(phase);
        const ScalarField lap = analytic ? ScalarField() : laplacian5(pf);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (!pf.active(i, j)) continue;
                const double d = phase * (g.y(j) - sol.graph(phase, i));
                if (!(d > 0.0)) continue;
                if (analytic) {
                    res.push_back(sol.exact_laplacian(phase, g.x(i), g.y(j)));
                } else if (lap.active(i, j)) {
                    res.push_back(lap(i, j));
                } else {
                    ++skipped;
                }
            }
        rep.add(phase > 0 ? "laplace_plus" : "laplace_minus", res, opt.tol, skipped);
    }

    // (b) traces on the graphs
    for (int phase : {1, -1}) {
        std::vector<double> res;
        long skipped = 0;
        for (std::size_t i = 0; i < sol.xs.size(); ++i) {
            double v;
            if (graph_trace(sol, analytic, phase, i, v))
                res.push_back(v);
            else
                ++skipped;
        }
        rep.add(phase > 0 ? "trace_plus" : "trace_minus", res, opt.tol, skipped);
    }

    // (c)-(e) gradient conditions
    PhaseGradients grads;
    if (!analytic) grads = phase_gradients(sol);
    const PhaseGradients* gp = analytic ? nullptr : &grads;
    const std::vector<int> cls = classify_abscissae(sol, ctol);
    std::vector<double> one[2], cont[2], jump;
    long excl_one[2] = {0, 0}, excl_cont[2] = {0, 0}, excl_jump = 0;
    for (std::size_t i = 0; i < sol.xs.size(); ++i) {
        const double x = sol.xs[i];
        double q[2];
        bool ok[2];
        for (int p = 0; p < 2; ++p) {
            Point2 gr;
            ok[p] = graph_gradient(sol, gp, p == 0 ? 1 : -1, i, gr);
            q[p] = gr.x * gr.x + gr.y * gr.y;
            if (analytic && ok[p] && sol.exact_grad_sq)
                q[p] = sol.exact_grad_sq(p == 0 ? 1 : -1, x, sol.graph(p == 0 ? 1 : -1, i));
        }
        if (cls[i] < 0) {
            ++excl_one[0];
            ++excl_one[1];
            ++excl_cont[0];
            ++excl_cont[1];
            ++excl_jump;
            continue;
        }
        for (int p = 0; p < 2; ++p) {
            const double L = sol.coefficient(p == 0 ? 1 : -1, x);
            if (cls[i] == 0) {
                if (ok[p])
                    one[p].push_back(q[p] - L);
                else
                    ++excl_one[p];
            } else {
                if (ok[p])
                    cont[p].push_back(std::max(0.0, L - q[p]));
                else
                    ++excl_cont[p];
            }
        }
        if (cls[i] == 1) {
            if (ok[0] && ok[1]) {
                const double lp = opt.ref_lambda_plus ? *opt.ref_lambda_plus : sol.coefficient(1, x);
                const double lm = opt.ref_lambda_minus ? *opt.ref_lambda_minus : sol.coefficient(-1, x);
                jump.push_back((q[0] - q[1]) - (lp - lm));
            } else {
                ++excl_jump;
            }
        }
    }
    rep.add("one_phase_plus", one[0], opt.tol, excl_one[0]);
    rep.add("one_phase_minus", one[1], opt.tol, excl_one[1]);
    rep.add("contact_plus", cont[0], opt.tol, excl_cont[0]);
    rep.add("contact_minus", cont[1], opt.tol, excl_cont[1]);
    rep.add("jump", jump, opt.tol, excl_jump);
    return rep;
}

std::vector<double> locate_transitions(const std::vector<double>& xs, const std::vector<double>& gap, double tol,
                                       double h, const Fn1& gap_fn) {
    if (tol < 0.0) throw InputError("contact tolerance must be non-negative");
    const std::size_t n = xs.size();
    double top = 0.0;
    for (double v : gap) top = std::max(top, v);
    const double floor = tol == 0.0 ? 0.0 : std::min(tol, 1e-9 * top);

    std::vector<double> pts;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const bool ck = gap[k] <= tol, cn = gap[k + 1] <= tol;
        if (ck == cn) continue;
        // walk from the gap side toward contact while the gap keeps dropping
        const long dir = ck ? -1 : 1;
        const long start = ck ? static_cast<long>(k) + 1 : static_cast<long>(k);
        long g = start;
        while (gap[g] > floor) {
            const long nx = g + dir;
            if (nx < 0 || nx >= static_cast<long>(n) || !(gap[nx] < gap[g])) break;
            g = nx;
        }
        if (gap[g] > floor || g == start) {
            pts.push_back(xs[g]);
            continue;
        }
        const long a = g - dir;  // gap above floor at a, at or below at g
        double xa = xs[a], xb = xs[g];
        if (gap_fn) {
            double fa = gap_fn(xa) - floor;
            if (fa > 0.0 && !(gap_fn(xb) - floor > 0.0)) {
                for (int it = 0; it < 60; ++it) {
                    const double m = 0.5 * (xa + xb);
                    if (gap_fn(m) - floor > 0.0)
                        xa = m;
                    else
                        xb = m;
                }
                pts.push_back(xb);
                continue;
            }
        }
        const double t = (gap[a] - floor) / (gap[a] - gap[g]);
        pts.push_back(xs[a] + t * (xs[g] - xs[a]));
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> merged;
    std::size_t i = 0;
    while (i < pts.size()) {
        std::size_t e = i;
        double sum = pts[i];
        while (e + 1 < pts.size() && pts[e + 1] - pts[e] <= h) sum += pts[++e];
        merged.push_back(sum / static_cast<double>(e - i + 1));
        i = e + 1;
    }
    return merged;
}

BranchingSet branching_set(const TwoPhaseSolution& sol, double tol) {
    if (tol < 0.0) throw InputError("contact tolerance must be non-negative");
    std::vector<double> gap(sol.xs.size());
    for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = sol.eta_plus[i] - sol.eta_minus[i];
    Fn1 gap_fn;
    if (sol.eta_plus_fn && sol.eta_minus_fn)
        gap_fn = [&sol](double x) { return sol.eta_plus_fn(x) - sol.eta_minus_fn(x); };
    BranchingSet b;
    b.tol = tol;
    b.h = sol.u.grid.h;
    b.points = locate_transitions(sol.xs, gap, tol, b.h, gap_fn);
    return b;
}

}  // namespace fbw
