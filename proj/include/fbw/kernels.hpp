#pragma once

// Row kernels for the data-parallel inner loops of the stencil code.
//
// Every kernel exists as a scalar reference and, on x86-64, an AVX2 variant.
// Both variants perform the same IEEE operations in the same order (no FMA),
// so their outputs are bitwise identical; tests/test_kernels.cpp holds them
// to that. The active table is picked once at first use from CPUID and can be
// forced with FBW_SIMD=scalar|avx2.

#include <cstddef>
#include <string_view>

namespace fbw::kernels {

struct Table {
    std::string_view name;
    /// out[k] = (plus[k] - minus[k]) * scale
    void (*central_diff)(const double* minus, const double* plus, double scale, double* out, std::size_t n);
    /// out[k] = ((w[k] + e[k]) + (s[k] + n[k]) - 4 c[k]) * scale
    void (*laplace5)(const double* w, const double* e, const double* s, const double* n, const double* c,
                     double scale, double* out, std::size_t len);
    /// out[k] = |rx[k] - iy[k]| + |ry[k] + ix[k]|
    void (*cr_residual)(const double* rx, const double* ry, const double* ix, const double* iy, double* out,
                        std::size_t n);
    /// out[k] = (a[k] + b[k]) * scale
    void (*pair_sum)(const double* a, const double* b, double scale, double* out, std::size_t n);
    /// max_k |x[k]|
    double (*max_abs)(const double* x, std::size_t n);
};

const Table& scalar();
/// nullptr when the build or the CPU lacks AVX2.
const Table* avx2();
/// The dispatched table.
const Table& active();
/// Overrides dispatch (tests, benchmarks). Passing nullptr restores CPUID choice.
void force(const Table* t);

}  // namespace fbw::kernels
