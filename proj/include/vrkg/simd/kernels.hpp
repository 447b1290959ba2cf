#pragma once

// Double-precision vector kernels used by every inner loop of propagation,
// back-propagation and the optimizer. A scalar reference table is always
// available; an AVX2+FMA (x86-64) or NEON (aarch64) table is selected at runtime
// when the CPU supports it. Vector variants reassociate sums, so they agree with
// the scalar reference to rounding, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace vrkg::simd {

struct AdamCoeffs {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double bias1;  // 1 - beta1^t
    double bias2;  // 1 - beta2^t
};

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scale)(double alpha, double* x, std::size_t n);
    // y = a * x + b * y  (two-term update used by the LWS adjoint)
    void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
    void (*adam)(double* theta, double* m, double* v, const double* g, std::size_t n,
                 const AdamCoeffs& c);
};

enum class Isa { Scalar, Avx2, Neon };

const KernelTable& scalar_table();
/// nullptr when the variant is not compiled in or the CPU lacks the extension.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// The table currently used by the library (best supported unless overridden).
const KernelTable& active();

/// Force a specific ISA; throws vrkg::Error(Config) if it is unavailable.
void select(Isa isa);
/// Parse "auto" | "scalar" | "avx2" | "neon" and select it.
void select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), y.size());
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }
inline void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    active().axpby(a, x.data(), b, y.data(), y.size());
}

}  // namespace vrkg::simd
