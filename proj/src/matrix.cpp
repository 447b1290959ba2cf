#include "vrkg/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace vrkg {

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::squared_norm() const noexcept {
    double sum = 0.0;
    for (double v : data_) sum += v * v;
    return sum;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    double worst = 0.0;
    auto fa = a.flat();
    auto fb = b.flat();
    for (std::size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, std::abs(fa[i] - fb[i]));
    return worst;
}

}  // namespace vrkg
