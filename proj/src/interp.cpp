#include "fbw/interp.hpp"

#include <algorithm>
#include <cmath>

#include "fbw/stencil.hpp"

namespace fbw {

HermiteField::HermiteField(GridSpec g, std::vector<double> f, std::vector<double> fx, std::vector<double> fy,
                           std::vector<double> fxy, Mask mask)
    : g_(g), f_(std::move(f)), fx_(std::move(fx)), fy_(std::move(fy)), fxy_(std::move(fxy)), mask_(std::move(mask)) {}

HermiteField HermiteField::from_field(const ScalarField& f) {
    auto dx = diff_x(f);
    auto dy = diff_y(f);
    auto dxy = diff_y(dx.field);
    Mask m = mask_and(mask_and(f.mask, dx.field.mask), mask_and(dy.field.mask, dxy.field.mask));
    return HermiteField(f.grid, f.values, dx.field.values, dy.field.values, dxy.field.values, std::move(m));
}

bool HermiteField::cell_active(int i, int j) const {
    if (i < 0 || j < 0 || i > g_.nx - 2 || j > g_.ny - 2) return false;
    return mask_[g_.idx(i, j)] && mask_[g_.idx(i + 1, j)] && mask_[g_.idx(i, j + 1)] && mask_[g_.idx(i + 1, j + 1)];
}

HermiteField::Value HermiteField::cell_value(int i, int j, double s, double t) const {
    const std::size_t k[2][2] = {{g_.idx(i, j), g_.idx(i, j + 1)}, {g_.idx(i + 1, j), g_.idx(i + 1, j + 1)}};
    auto basis = [](double u, double b[4], double db[4]) {
        const double u2 = u * u, u3 = u2 * u;
        b[0] = 2 * u3 - 3 * u2 + 1;  // value at 0
        b[1] = -2 * u3 + 3 * u2;     // value at 1
        b[2] = u3 - 2 * u2 + u;      // slope at 0
        b[3] = u3 - u2;              // slope at 1
        db[0] = 6 * u2 - 6 * u;
        db[1] = -6 * u2 + 6 * u;
        db[2] = 3 * u2 - 4 * u + 1;
        db[3] = 3 * u2 - 2 * u;
    };
    double bs[4], dbs[4], bt[4], dbt[4];
    basis(s, bs, dbs);
    basis(t, bt, dbt);
    const double h = g_.h;
    Value v;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const auto kk = k[a][b];
            const double c0 = f_[kk], cx = h * fx_[kk], cy = h * fy_[kk], cxy = h * h * fxy_[kk];
            const double pa = bs[a], qa = bs[2 + a], dpa = dbs[a], dqa = dbs[2 + a];
            const double pb = bt[b], qb = bt[2 + b], dpb = dbt[b], dqb = dbt[2 + b];
            v.f += c0 * pa * pb + cx * qa * pb + cy * pa * qb + cxy * qa * qb;
            v.fx += (c0 * dpa * pb + cx * dqa * pb + cy * dpa * qb + cxy * dqa * qb) / h;
            v.fy += (c0 * pa * dpb + cx * qa * dpb + cy * pa * dqb + cxy * qa * dqb) / h;
        }
    }
    return v;
}

bool HermiteField::eval(double x, double y, Value& out) const {
    const double fx = (x - g_.x0) / g_.h, fy = (y - g_.y0) / g_.h;
    const double tol = 1e-9;
    if (fx < -tol || fy < -tol || fx > g_.nx - 1 + tol || fy > g_.ny - 1 + tol) return false;
    const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g_.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g_.ny - 2);
    if (!cell_active(i, j)) return false;
    out = cell_value(i, j, std::clamp(fx - i, 0.0, 1.0), std::clamp(fy - j, 0.0, 1.0));
    return true;
}

bool HermiteField::eval_near(double x, double y, Value& out, int reach) const {
    if (eval(x, y, out)) return true;
    const double fx = (x - g_.x0) / g_.h, fy = (y - g_.y0) / g_.h;
    const int i0 = static_cast<int>(std::floor(fx)), j0 = static_cast<int>(std::floor(fy));
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int dj = -reach; dj <= reach; ++dj)
        for (int di = -reach; di <= reach; ++di) {
            const int i = i0 + di, j = j0 + dj;
            if (!cell_active(i, j)) continue;
            const double cx = i + 0.5 - fx, cy = j + 0.5 - fy, d = cx * cx + cy * cy;
            if (best < 0.0 || d < best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    if (best < 0.0) return false;
    out = cell_value(bi, bj, fx - bi, fy - bj);
    return true;
}

double cubic_sample(double x0, double h, const std::vector<double>& v, double x) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return 0.0;
    if (n == 1) return v[0];
    const double fx = std::clamp((x - x0) / h, 0.0, static_cast<double>(n - 1));
    const int i = std::min(static_cast<int>(std::floor(fx)), n - 2);
    const double t = fx - i;
    if (i == 0 || i + 2 >= n || n < 4) return (1 - t) * v[i] + t * v[i + 1];
    const double a = v[i - 1], b = v[i], c = v[i + 1], d = v[i + 2];
    // Lagrange weights on nodes -1, 0, 1, 2.
    const double w0 = -t * (t - 1) * (t - 2) / 6.0;
    const double w1 = (t + 1) * (t - 1) * (t - 2) / 2.0;
    const double w2 = -(t + 1) * t * (t - 2) / 2.0;
    const double w3 = (t + 1) * t * (t - 1) / 6.0;
    return w0 * a + w1 * b + w2 * c + w3 * d;
}

double linear_sample(const std::vector<double>& xs, const std::vector<double>& v, double x) {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return v.front();
    if (x >= xs.back()) return v.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto k = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1 - t) * v[k - 1] + t * v[k];
}

}  // namespace fbw
