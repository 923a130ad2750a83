#include "fbw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace fbw {

void GridSpec::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw InputError("grid spacing must be positive");
    if (nx < 3 || ny < 3) throw InputError("grid needs at least 3 samples per axis");
}

GridSpec GridSpec::covering(double xa, double xb, double ya, double yb, double h) {
    if (!(h > 0.0)) throw InputError("grid spacing must be positive");
    const double ia = std::floor(xa / h + 1e-9);
    const double ib = std::ceil(xb / h - 1e-9);
    const double ja = std::floor(ya / h + 1e-9);
    const double jb = std::ceil(yb / h - 1e-9);
    GridSpec g;
    g.h = h;
    g.x0 = ia * h;
    g.y0 = ja * h;
    g.nx = static_cast<int>(ib - ia) + 1;
    g.ny = static_cast<int>(jb - ja) + 1;
    g.validate();
    return g;
}

ScalarField::ScalarField(const GridSpec& g, double fill)
    : grid(g), values(g.size(), fill), mask(g.size(), 1) {}

ScalarField ScalarField::sample(const GridSpec& g, const std::function<double(double, double)>& fn) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = fn(g.x(i), g.y(j));
    return f;
}

double ScalarField::sup_abs() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (mask[k]) s = std::max(s, std::abs(values[k]));
    return s;
}

ComplexField::ComplexField(const GridSpec& g) : grid(g), re(g.size(), 0.0), im(g.size(), 0.0), mask(g.size(), 1) {}

OneForm::OneForm(const GridSpec& g) : grid(g), a(g.size(), 0.0), b(g.size(), 0.0), mask(g.size(), 1) {}

int label_components(const GridSpec& g, const Mask& m, std::uint8_t want, std::vector<int>& label) {
    label.assign(g.size(), -1);
    int count = 0;
    std::queue<std::pair<int, int>> q;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.idx(i, j);
            if ((m[k] != 0) != (want != 0) || label[k] >= 0) continue;
            label[k] = count;
            q.push({i, j});
            while (!q.empty()) {
                auto [ci, cj] = q.front();
                q.pop();
                const int di[4] = {1, -1, 0, 0};
                const int dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int ni = ci + di[d], nj = cj + dj[d];
                    if (!g.inside(ni, nj)) continue;
                    const auto nk = g.idx(ni, nj);
                    if ((m[nk] != 0) != (want != 0) || label[nk] >= 0) continue;
                    label[nk] = count;
                    q.push({ni, nj});
                }
            }
            ++count;
        }
    }
    return count;
}


int count_components(const GridSpec& g, const Mask& m) {
    std::vector<int> label;
    return label_components(g, m, 1, label);
}

int count_holes(const GridSpec& g, const Mask& m) {
    std::vector<int> label;
    const int n = label_components(g, m, 0, label);
    std::vector<std::uint8_t> touches(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i != 0 && j != 0 && i != g.nx - 1 && j != g.ny - 1) continue;
            const int l = label[g.idx(i, j)];
            if (l >= 0) touches[static_cast<std::size_t>(l)] = 1;
        }
    }
    return static_cast<int>(std::count(touches.begin(), touches.end(), 0));
}

std::pair<int, int> nearest_active(const GridSpec& g, const Mask& m, double px, double py) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> at{-1, -1};
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!m[g.idx(i, j)]) continue;
            const double d = std::hypot(g.x(i) - px, g.y(j) - py);
            if (d < best) {
                best = d;
                at = {i, j};
            }
        }
    }
    if (at.first < 0) throw InputError("empty mask");
    return at;
}

}  // namespace fbw
