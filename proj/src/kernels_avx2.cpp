#include <immintrin.h>

#include <cmath>

#include "fbw/kernels.hpp"

namespace fbw::kernels {
namespace avx2_impl {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

void central_diff(const double* minus, const double* plus, double scale, double* out, std::size_t n) {
    const __m256d s = _mm256_set1_pd(scale);
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(plus + k), _mm256_loadu_pd(minus + k));
        _mm256_storeu_pd(out + k, _mm256_mul_pd(d, s));
    }
    for (; k < n; ++k) out[k] = (plus[k] - minus[k]) * scale;
}

void laplace5(const double* w, const double* e, const double* s, const double* n, const double* c, double scale,
              double* out, std::size_t len) {
    const __m256d sc = _mm256_set1_pd(scale);
    const __m256d four = _mm256_set1_pd(4.0);
    std::size_t k = 0;
    for (; k + kLanes <= len; k += kLanes) {
        const __m256d we = _mm256_add_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(e + k));
        const __m256d sn = _mm256_add_pd(_mm256_loadu_pd(s + k), _mm256_loadu_pd(n + k));
        const __m256d c4 = _mm256_mul_pd(four, _mm256_loadu_pd(c + k));
        _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_sub_pd(_mm256_add_pd(we, sn), c4), sc));
    }
    for (; k < len; ++k) out[k] = (((w[k] + e[k]) + (s[k] + n[k])) - 4.0 * c[k]) * scale;
}

void cr_residual(const double* rx, const double* ry, const double* ix, const double* iy, double* out,
                 std::size_t n) {
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        const __m256d a = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(rx + k), _mm256_loadu_pd(iy + k)));
        const __m256d b = abs_pd(_mm256_add_pd(_mm256_loadu_pd(ry + k), _mm256_loadu_pd(ix + k)));
        _mm256_storeu_pd(out + k, _mm256_add_pd(a, b));
    }
    for (; k < n; ++k) out[k] = std::fabs(rx[k] - iy[k]) + std::fabs(ry[k] + ix[k]);
}

void pair_sum(const double* a, const double* b, double scale, double* out, std::size_t n) {
    const __m256d s = _mm256_set1_pd(scale);
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes)
        _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)), s));
    for (; k < n; ++k) out[k] = (a[k] + b[k]) * scale;
}

double max_abs(const double* x, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(x + k)));
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, m);
    double r = 0.0;
    for (double v : lanes)
        if (v > r) r = v;
    for (; k < n; ++k) {
        const double a = std::fabs(x[k]);
        if (a > r) r = a;
    }
    return r;
}

}  // namespace

constexpr Table kAvx2{"avx2", central_diff, laplace5, cr_residual, pair_sum, max_abs};

}  // namespace avx2_impl

const Table* avx2_table() { return &avx2_impl::kAvx2; }

}  // namespace fbw::kernels
