#include <cstdlib>
#include <string_view>

#include "edtr/simd/kernels.hpp"

namespace edtr::simd {

namespace detail {
#if defined(EDTR_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(EDTR_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

const KernelTable* avx2_kernels() {
#if defined(EDTR_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(EDTR_HAVE_NEON)
    // Advanced SIMD is mandatory on AArch64.
    return &detail::neon_table();
#else
    return nullptr;
#endif
}

namespace {

const KernelTable& select_kernels() {
    if (const char* forced = std::getenv("EDTR_SIMD"); forced && std::string_view(forced) == "scalar") {
        return scalar_kernels();
    }
    if (const auto* t = avx2_kernels()) return *t;
    if (const auto* t = neon_kernels()) return *t;
    return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
    static const KernelTable& table = select_kernels();
    return table;
}

}  // namespace edtr::simd
