#include <atomic>
#include <cstdlib>
#include <string_view>

#include "fbw/kernels.hpp"

namespace fbw::kernels {

#if defined(FBW_HAVE_AVX2)
const Table* avx2_table();
#endif

namespace {

std::atomic<const Table*> g_forced{nullptr};

const Table& detect() {
    const char* env = std::getenv("FBW_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar();
    if (const Table* t = avx2()) return *t;
    return scalar();
}

}  // namespace

const Table* avx2() {
#if defined(FBW_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2") != 0;
    return ok ? avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const Table& active() {
    if (const Table* f = g_forced.load(std::memory_order_acquire)) return *f;
    static const Table& chosen = detect();
    return chosen;
}

void force(const Table* t) { g_forced.store(t, std::memory_order_release); }

}  // namespace fbw::kernels
