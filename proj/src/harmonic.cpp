#include "fbw/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fbw {
namespace {

// One discrete equation: u = (sum c_k u[nb_k] + rhs) / diag.
struct Row {
    std::size_t at;
    std::size_t nb[4];
    double c[4];
    double rhs;
    double diag;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

HarmonicSolution relax(const GridSpec& g, std::vector<double> u, const Mask& active, const Mask& unknown,
                       std::vector<Row> rows, double scale, const HarmonicOptions& opt) {
    const double pi = std::numbers::pi;
    double omega = opt.omega;
    if (omega <= 0.0) {
        const double rho = 0.5 * (std::cos(pi / (g.nx - 1)) + std::cos(pi / (g.ny - 1)));
        omega = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
    }
    const int budget = opt.max_sweeps > 0 ? opt.max_sweeps : 200 * (g.nx + g.ny);
    const double target = opt.tol * std::max(1.0, scale);

    auto eval = [&](const Row& r) {
        double s = r.rhs;
        for (int d = 0; d < 4; ++d)
            if (r.nb[d] != kNone) s += r.c[d] * u[r.nb[d]];
        return s / r.diag;
    };

    int sweep = 0;
    double last = 0.0;
    for (; sweep < budget; ++sweep) {
        double worst = 0.0;
        for (const Row& r : rows) {
            const double delta = eval(r) - u[r.at];
            worst = std::max(worst, std::abs(delta));
            u[r.at] += omega * delta;
        }
        last = worst;
        if (worst <= target) break;
    }
    double residual = 0.0;
    for (const Row& r : rows) residual = std::max(residual, std::abs(eval(r) - u[r.at]));
    if (sweep >= budget && residual > target)
        throw ConvergenceError("harmonic solve did not converge; residual " + std::to_string(residual), residual);
    (void)last;

    HarmonicSolution out;
    out.field.grid = g;
    out.field.values = std::move(u);
    out.field.mask = active;
    for (std::size_t k = 0; k < out.field.values.size(); ++k)
        if (!active[k]) out.field.values[k] = 0.0;
    out.unknown = unknown;
    out.sweeps = sweep + 1;
    out.residual = residual;
    return out;
}

}  // namespace

double locate_crossing(const std::function<double(double, double)>& level, Point2 p, Point2 q) {
    auto L = [&](double t) { return level(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)); };
    double a = 0.0, b = 1.0;
    double fa = L(a), fb = L(b);
    if (!(fa > 0.0) || fb > 0.0) return 1.0;
    int side = 0;
    for (int it = 0; it < 100; ++it) {
        double t = (a * fb - b * fa) / (fb - fa);
        // roots within roundoff of an end stall the secant
        if (!(t > a && t < b)) t = 0.5 * (a + b);
        const double ft = L(t);
        if (ft == 0.0) return std::max(t, 0.0);
        if (ft > 0.0) {
            a = t;
            fa = ft;
            if (side == 1) fb *= 0.5;
            side = 1;
        } else {
            b = t;
            fb = ft;
            if (side == -1) fa *= 0.5;
            side = -1;
        }
        if (b - a <= 1e-15 * std::max(b, 1e-300)) break;
    }
    return 0.5 * (a + b);
}

HarmonicSolution solve_dirichlet_harmonic(const ScalarField& data, const HarmonicOptions& opt) {
    const GridSpec& g = data.grid;
    g.validate();
    if (count_components(g, data.mask) != 1) throw InputError("harmonic solve needs a connected mask");
    Mask unknown(g.size(), 0);
    std::vector<Row> rows;
    double scale = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!data.active(i, j)) continue;
            const bool interior = data.active(i - 1, j) && data.active(i + 1, j) && data.active(i, j - 1) &&
                                  data.active(i, j + 1);
            if (!interior) {
                scale = std::max(scale, std::abs(data(i, j)));
                continue;
            }
            unknown[g.idx(i, j)] = 1;
            rows.push_back(Row{g.idx(i, j),
                               {g.idx(i - 1, j), g.idx(i + 1, j), g.idx(i, j - 1), g.idx(i, j + 1)},
                               {1.0, 1.0, 1.0, 1.0},
                               0.0,
                               4.0});
        }
    }
    std::vector<double> u = data.values;
    for (const Row& r : rows) u[r.at] = 0.0;
    return relax(g, std::move(u), data.mask, unknown, std::move(rows), scale, opt);
}

HarmonicSolution solve_dirichlet_harmonic(const CutDomain& dom, const HarmonicOptions& opt) {
    const GridSpec& g = dom.grid;
    g.validate();
    Mask active(g.size(), 0), unknown(g.size(), 0);
    std::vector<double> lev(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            lev[k] = dom.level(g.x(i), g.y(j));
            active[k] = lev[k] >= 0.0 ? 1 : 0;
        }
    if (count_components(g, active) != 1) throw InputError("harmonic solve needs a connected domain");

    std::vector<double> u(g.size(), 0.0);
    double scale = 0.0;
    std::vector<Row> rows;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            if (!active[k]) continue;
            const bool border = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            if (border || lev[k] == 0.0) {
                u[k] = dom.value(g.x(i), g.y(j));
                scale = std::max(scale, std::abs(u[k]));
                continue;
            }
            unknown[k] = 1;
            const int di[4] = {-1, 1, 0, 0};
            const int dj[4] = {0, 0, -1, 1};
            double theta[4];
            double bval[4] = {0, 0, 0, 0};
            std::size_t nb[4];
            for (int d = 0; d < 4; ++d) {
                const int ni = i + di[d], nj = j + dj[d];
                const auto nk = g.idx(ni, nj);
                if (active[nk]) {
                    theta[d] = 1.0;
                    nb[d] = nk;
                } else {
                    const Point2 p{g.x(i), g.y(j)}, q{g.x(ni), g.y(nj)};
                    theta[d] = locate_crossing(dom.level, p, q);
                    const double cx = p.x + theta[d] * (q.x - p.x);
                    const double cy = p.y + theta[d] * (q.y - p.y);
                    bval[d] = dom.cut_value ? dom.cut_value(cx, cy) : dom.value(cx, cy);
                    scale = std::max(scale, std::abs(bval[d]));
                    nb[d] = kNone;
                }
            }
            // Shortley-Weller weights, every term multiplied by the smallest arm
            // so that arms of length ~1e-300 h stay finite.
            const double s = *std::min_element(theta, theta + 4);
            Row r{k, {nb[0], nb[1], nb[2], nb[3]}, {0, 0, 0, 0}, 0.0, 0.0};
            for (int axis = 0; axis < 2; ++axis) {
                const int m = 2 * axis, p = 2 * axis + 1;
                const double tm = theta[m], tp = theta[p];
                const double cm = 2.0 * (s / tm) / (tm + tp);
                const double cp = 2.0 * (s / tp) / (tm + tp);
                r.diag += tm <= tp ? 2.0 * (s / tm) / tp : 2.0 * (s / tp) / tm;
                r.c[m] = cm;
                r.c[p] = cp;
                if (nb[m] == kNone) r.rhs += cm * bval[m];
                if (nb[p] == kNone) r.rhs += cp * bval[p];
            }
            rows.push_back(r);
        }
    }
    return relax(g, std::move(u), active, unknown, std::move(rows), scale, opt);
}

}  // namespace fbw
