#pragma once

// Dense double-precision inner loops used by the geometry and Dirichlet-head
// code. Each instruction set provides a KernelTable; the scalar table is the
// reference every other variant is tested against.

#include <cstddef>
#include <span>
#include <string_view>

namespace edtr::simd {

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Table picked once at first use: the widest supported variant, unless the
/// EDTR_SIMD environment variable is set to "scalar".
const KernelTable& active_kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active_kernels().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    return active_kernels().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace edtr::simd
