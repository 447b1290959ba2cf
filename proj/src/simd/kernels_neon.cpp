#include <arm_neon.h>

#include <cmath>

#include "vrkg/simd/kernels.hpp"

namespace vrkg::simd {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(double alpha, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void axpby_neon(double a, const double* x, double b, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vmulq_f64(vb, vld1q_f64(y + i)), va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void adam_neon(double* theta, double* m, double* v, const double* g, std::size_t n,
               const AdamCoeffs& c) {
    const float64x2_t b1 = vdupq_n_f64(c.beta1);
    const float64x2_t b2 = vdupq_n_f64(c.beta2);
    const float64x2_t one_b1 = vdupq_n_f64(1.0 - c.beta1);
    const float64x2_t one_b2 = vdupq_n_f64(1.0 - c.beta2);
    const float64x2_t bias1 = vdupq_n_f64(c.bias1);
    const float64x2_t bias2 = vdupq_n_f64(c.bias2);
    const float64x2_t lr = vdupq_n_f64(c.lr);
    const float64x2_t eps = vdupq_n_f64(c.eps);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t gi = vld1q_f64(g + i);
        float64x2_t mi = vfmaq_f64(vmulq_f64(one_b1, gi), b1, vld1q_f64(m + i));
        float64x2_t vi = vfmaq_f64(vmulq_f64(one_b2, vmulq_f64(gi, gi)), b2, vld1q_f64(v + i));
        vst1q_f64(m + i, mi);
        vst1q_f64(v + i, vi);
        const float64x2_t denom = vaddq_f64(vsqrtq_f64(vdivq_f64(vi, bias2)), eps);
        const float64x2_t step = vdivq_f64(vmulq_f64(lr, vdivq_f64(mi, bias1)), denom);
        vst1q_f64(theta + i, vsubq_f64(vld1q_f64(theta + i), step));
    }
    for (; i < n; ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        theta[i] -= c.lr * (m[i] / c.bias1) / (std::sqrt(v[i] / c.bias2) + c.eps);
    }
}

constexpr KernelTable kNeon{"neon", dot_neon, axpy_neon, scale_neon, axpby_neon, adam_neon};

}  // namespace

const KernelTable& neon_table_unchecked() { return kNeon; }

}  // namespace vrkg::simd
