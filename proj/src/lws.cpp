#include "vrkg/lws.hpp"

#include <algorithm>
#include <cmath>

#include "vrkg/simd/kernels.hpp"

namespace vrkg {

double propagation_weight(std::span<const double> center, std::span<const double> neighbor) {
    return simd::dot(center, neighbor);
}

double norm_bound_scale(double squared_norm) {
    if (squared_norm == 0.0) return 0.0;
    return std::sqrt(squared_norm) / (squared_norm + 1.0);
}

void norm_bound(std::span<const double> u, std::span<double> out) {
    const double scale = norm_bound_scale(simd::dot(u, u));
    if (out.data() != u.data()) std::copy(u.begin(), u.end(), out.begin());
    simd::scale(scale, out);
}

std::vector<double> norm_bound(std::span<const double> u) {
    std::vector<double> out(u.size());
    norm_bound(u, out);
    return out;
}

namespace {

// w = u + sum_t (u . e_t) e_t; optionally records the weights.
void accumulate_neighbors(std::span<const double> u, std::span<const std::uint32_t> neighbors,
                          const Matrix& mat, std::span<double> w, double* weights) {
    std::copy(u.begin(), u.end(), w.begin());
    for (std::size_t j = 0; j < neighbors.size(); ++j) {
        auto e = mat.row(neighbors[j]);
        const double pi = simd::dot(u, e);
        if (weights != nullptr) weights[j] = pi;
        simd::axpy(pi, e, w);
    }
}

}  // namespace

void aggregate_once(std::span<const double> center, std::span<const std::uint32_t> neighbors,
                    const Matrix& neighbor_matrix, std::span<double> out) {
    thread_local std::vector<double> w;
    w.resize(center.size());
    accumulate_neighbors(center, neighbors, neighbor_matrix, w, nullptr);
    norm_bound(w, out);
}

void lws_smooth(std::span<const double> center, std::span<const std::uint32_t> neighbors,
                const Matrix& neighbor_matrix, int iterations, std::span<double> out) {
    thread_local std::vector<double> u;
    thread_local std::vector<double> w;
    u.assign(center.begin(), center.end());
    w.resize(center.size());
    for (int q = 0; q < iterations; ++q) {
        accumulate_neighbors(u, neighbors, neighbor_matrix, w, nullptr);
        norm_bound(w, u);
    }
    std::copy(u.begin(), u.end(), out.begin());
}

void lws_smooth_graph(const Matrix& centers, const Csr& graph, const Matrix& neighbor_matrix,
                      int iterations, Matrix& out) {
    if (out.rows() != centers.rows() || out.cols() != centers.cols()) out = Matrix(centers.rows(), centers.cols());
    const auto n = static_cast<std::int64_t>(centers.rows());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t h = 0; h < n; ++h) {
        lws_smooth(centers.row(h), graph.row(h), neighbor_matrix, iterations, out.row(h));
    }
}

void norm_bound_backward(std::span<const double> w, std::span<const double> grad_out,
                         std::span<double> grad_in) {
    // f(w) = phi(n) w with phi(n) = n / (n^2 + 1):
    //   J^T g = phi g + (phi'(n) / n) (w . g) w,  phi'(n) = (1 - n^2) / (n^2 + 1)^2
    const double n2 = simd::dot(w, w);
    if (n2 == 0.0) {
        std::fill(grad_in.begin(), grad_in.end(), 0.0);
        return;
    }
    const double n = std::sqrt(n2);
    const double denom = n2 + 1.0;
    const double phi = n / denom;
    const double radial = (1.0 - n2) / (denom * denom * n) * simd::dot(w, grad_out);
    std::copy(grad_out.begin(), grad_out.end(), grad_in.begin());
    simd::axpby(radial, w, phi, grad_in);
}

void lws_smooth_backward(std::span<const double> center, std::span<const std::uint32_t> neighbors,
                         const Matrix& neighbor_matrix, int iterations,
                         std::span<const double> grad_out, std::span<double> grad_center,
                         std::span<double> edge_grads) {
    const std::size_t d = center.size();
    const std::size_t deg = neighbors.size();
    const auto q_count = static_cast<std::size_t>(iterations);

    thread_local std::vector<double> states;   // u^0 .. u^{Q-1}
    thread_local std::vector<double> pre;      // w^1 .. w^Q
    thread_local std::vector<double> weights;  // pi per (q, neighbor)
    thread_local std::vector<double> g;
    thread_local std::vector<double> gw;
    states.resize(q_count * d);
    pre.resize(q_count * d);
    weights.resize(q_count * deg);
    g.assign(grad_out.begin(), grad_out.end());
    gw.resize(d);

    std::span<double> all_states(states);
    std::span<double> all_pre(pre);
    std::copy(center.begin(), center.end(), all_states.begin());
    for (std::size_t q = 0; q < q_count; ++q) {
        auto u = all_states.subspan(q * d, d);
        auto w = all_pre.subspan(q * d, d);
        accumulate_neighbors(u, neighbors, neighbor_matrix, w, weights.data() + q * deg);
        if (q + 1 < q_count) norm_bound(w, all_states.subspan((q + 1) * d, d));
    }

    std::fill(edge_grads.begin(), edge_grads.end(), 0.0);
    for (std::size_t q = q_count; q-- > 0;) {
        auto u = all_states.subspan(q * d, d);
        norm_bound_backward(all_pre.subspan(q * d, d), g, gw);
        // w = u + sum_j pi_j e_j with pi_j = u . e_j
        std::copy(gw.begin(), gw.end(), g.begin());
        for (std::size_t j = 0; j < deg; ++j) {
            auto e = neighbor_matrix.row(neighbors[j]);
            auto eg = edge_grads.subspan(j * d, d);
            const double c = simd::dot(e, gw);
            simd::axpy(c, e, g);
            simd::axpy(weights[q * deg + j], gw, eg);
            simd::axpy(c, u, eg);
        }
    }
    std::copy(g.begin(), g.end(), grad_center.begin());
}

}  // namespace vrkg
