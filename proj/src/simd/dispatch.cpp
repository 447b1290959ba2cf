#include <atomic>
#include <string>

#include "vrkg/error.hpp"
#include "vrkg/simd/kernels.hpp"

namespace vrkg::simd {

#if defined(VRKG_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif
#if defined(VRKG_HAVE_NEON)
const KernelTable& neon_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(VRKG_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(VRKG_HAVE_NEON)
    // Advanced SIMD with fp64 is mandatory on aarch64.
    return &neon_table_unchecked();
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* best_table() {
    if (const KernelTable* t = avx2_table()) return t;
    if (const KernelTable* t = neon_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        t = best_table();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void select(Isa isa) {
    const KernelTable* t = nullptr;
    switch (isa) {
        case Isa::Scalar: t = &scalar_table(); break;
        case Isa::Avx2: t = avx2_table(); break;
        case Isa::Neon: t = neon_table(); break;
    }
    if (t == nullptr) throw config_error("requested SIMD kernel variant is not available on this CPU");
    g_active.store(t, std::memory_order_release);
}

void select(std::string_view name) {
    if (name == "auto") {
        g_active.store(best_table(), std::memory_order_release);
    } else if (name == "scalar") {
        select(Isa::Scalar);
    } else if (name == "avx2") {
        select(Isa::Avx2);
    } else if (name == "neon") {
        select(Isa::Neon);
    } else {
        throw config_error("unknown kernel '" + std::string(name) + "' (expected auto|scalar|avx2|neon)");
    }
}

}  // namespace vrkg::simd
