#include <cmath>

#include "fbw/kernels.hpp"

namespace fbw::kernels {
namespace {

void central_diff(const double* minus, const double* plus, double scale, double* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) out[k] = (plus[k] - minus[k]) * scale;
}

void laplace5(const double* w, const double* e, const double* s, const double* n, const double* c, double scale,
              double* out, std::size_t len) {
    for (std::size_t k = 0; k < len; ++k) out[k] = (((w[k] + e[k]) + (s[k] + n[k])) - 4.0 * c[k]) * scale;
}

void cr_residual(const double* rx, const double* ry, const double* ix, const double* iy, double* out,
                 std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) out[k] = std::fabs(rx[k] - iy[k]) + std::fabs(ry[k] + ix[k]);
}

void pair_sum(const double* a, const double* b, double scale, double* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) out[k] = (a[k] + b[k]) * scale;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = std::fabs(x[k]);
        if (a > m) m = a;
    }
    return m;
}

constexpr Table kScalar{"scalar", central_diff, laplace5, cr_residual, pair_sum, max_abs};

}  // namespace

const Table& scalar() { return kScalar; }

}  // namespace fbw::kernels
