#include <cmath>

#include "vrkg/simd/kernels.hpp"

namespace vrkg::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void adam_scalar(double* theta, double* m, double* v, const double* g, std::size_t n,
                 const AdamCoeffs& c) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double m_hat = m[i] / c.bias1;
        const double v_hat = v[i] / c.bias2;
        theta[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
}

constexpr KernelTable kScalar{"scalar", dot_scalar, axpy_scalar, scale_scalar, axpby_scalar,
                              adam_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace vrkg::simd
