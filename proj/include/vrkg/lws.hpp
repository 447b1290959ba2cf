#pragma once

// Local weighted smoothing. One aggregation step pulls a center vector toward
// the inner-product-weighted sum of its neighbors and bounds the result's norm
// into [0, 1):
//
//   w = u + sum_t (u . e_t) e_t
//   u' = w * |w| / (|w|^2 + 1)
//
// `lws_smooth` repeats the step Q times, re-weighting from the current center
// but always reading the same neighbor vectors.

#include <cstdint>
#include <span>
#include <vector>

#include "vrkg/graph.hpp"
#include "vrkg/matrix.hpp"

namespace vrkg {

struct LwsConfig {
    int iterations = 3;
};

double propagation_weight(std::span<const double> center, std::span<const double> neighbor);

/// |u| / (|u|^2 + 1), the scale applied by norm_bound; 0 at u = 0.
double norm_bound_scale(double squared_norm);

/// out = u * |u| / (|u|^2 + 1); out may alias u.
void norm_bound(std::span<const double> u, std::span<double> out);
std::vector<double> norm_bound(std::span<const double> u);

void aggregate_once(std::span<const double> center, std::span<const std::uint32_t> neighbors,
                    const Matrix& neighbor_matrix, std::span<double> out);

void lws_smooth(std::span<const double> center, std::span<const std::uint32_t> neighbors,
                const Matrix& neighbor_matrix, int iterations, std::span<double> out);

/// Smooths every row of `centers` over its adjacency row in `graph`.
/// Rows are independent and processed in parallel.
void lws_smooth_graph(const Matrix& centers, const Csr& graph, const Matrix& neighbor_matrix,
                      int iterations, Matrix& out);

/// Vector-Jacobian product of lws_smooth for one center. `grad_center` receives
/// d(loss)/d(center); row j of `edge_grads` (degree x d, contiguous) receives
/// d(loss)/d(neighbor j). Both are overwritten. Intermediate states are
/// recomputed from the inputs, so nothing needs to be kept from the forward pass.
void lws_smooth_backward(std::span<const double> center, std::span<const std::uint32_t> neighbors,
                         const Matrix& neighbor_matrix, int iterations,
                         std::span<const double> grad_out, std::span<double> grad_center,
                         std::span<double> edge_grads);

/// Vector-Jacobian product of norm_bound at w.
void norm_bound_backward(std::span<const double> w, std::span<const double> grad_out,
                         std::span<double> grad_in);

}  // namespace vrkg
