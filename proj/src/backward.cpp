#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "vrkg/error.hpp"
#include "vrkg/lws.hpp"
#include "vrkg/simd/kernels.hpp"
#include "vrkg/train.hpp"

namespace vrkg {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Pulls `upstream` (scaled) back through lws_smooth_graph(centers, graph, neighbors).
// Center gradients land in center_grads, neighbor gradients in neighbor_grads.
// Per-edge gradients are staged in a buffer and gathered through the reverse
// index, so every output row has a single writer and a fixed summation order.
void smooth_graph_adjoint(const Matrix& centers, const Csr& graph, const Csr& incoming,
                          const Matrix& neighbor_matrix, int iterations, const Matrix& upstream,
                          double upstream_scale, Matrix& center_grads, Matrix& neighbor_grads) {
    const std::size_t d = centers.cols();
    Matrix edge_buf(graph.edge_count(), d);
    const auto n = static_cast<std::int64_t>(centers.rows());

#pragma omp parallel
    {
        std::vector<double> g_out(d);
        std::vector<double> g_center(d);
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t h = 0; h < n; ++h) {
            auto up = upstream.row(h);
            if (std::all_of(up.begin(), up.end(), [](double v) { return v == 0.0; })) continue;
            for (std::size_t c = 0; c < d; ++c) g_out[c] = upstream_scale * up[c];
            std::span<double> edges(edge_buf.data() + graph.offsets[h] * d, graph.degree(h) * d);
            lws_smooth_backward(centers.row(h), graph.row(h), neighbor_matrix, iterations, g_out, g_center,
                                edges);
            simd::axpy(1.0, g_center, center_grads.row(h));
        }
    }

    const auto targets = static_cast<std::int64_t>(incoming.rows());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t t = 0; t < targets; ++t) {
        auto dst = neighbor_grads.row(t);
        for (std::uint32_t e : incoming.row(t)) simd::axpy(1.0, edge_buf.row(e), dst);
    }
}

}  // namespace

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double bpr_loss(std::span<const double> pos_scores, std::span<const double> neg_scores) {
    if (pos_scores.size() != neg_scores.size()) throw config_error("bpr_loss: score lists differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < pos_scores.size(); ++i) total += softplus(-(pos_scores[i] - neg_scores[i]));
    return total;
}

std::vector<Block> trainable_blocks(ClusterStrategy strategy) {
    if (strategy == ClusterStrategy::EntityGrounded) {
        return {Block::User, Block::Entity, Block::Centroid, Block::Fusion};
    }
    return {kAllBlocks.begin(), kAllBlocks.end()};
}

BatchLoss batch_loss(const ParameterSet& params, const ModelView& model, std::span<const BprTriple> batch,
                     double lambda, std::span<const Block> registry) {
    const FinalRepresentations finals = final_representations(forward(params, model));
    BatchLoss loss;
    for (const BprTriple& t : batch) {
        const double margin = predict(finals, model.item_entity, t.user, t.positive) -
                              predict(finals, model.item_entity, t.user, t.negative);
        loss.bpr += softplus(-margin);
    }
    loss.l2 = l2_penalty(params, lambda, registry);
    return loss;
}

BatchLoss backward(const PropagationSnapshot& snapshot, const ParameterSet& params, const ModelView& model,
                   std::span<const BprTriple> batch, double lambda, std::span<const Block> registry,
                   GradientSet& grads) {
    grads = zeros_like(params);
    const FinalRepresentations finals = final_representations(snapshot);
    const std::size_t d = params.dim();
    const std::size_t k_count = model.partition.virtual_count();

    // Gradient with respect to the final (layer-summed) representations.
    Matrix gx_final(params.entity_emb.rows(), d);
    Matrix gy_final(params.user_emb.rows(), d);
    BatchLoss loss;
    for (const BprTriple& t : batch) {
        const EntityId pos = model.item_entity[t.positive];
        const EntityId neg = model.item_entity[t.negative];
        auto eu = finals.users.row(t.user);
        auto ei = finals.entities.row(pos);
        auto ej = finals.entities.row(neg);
        const double margin = simd::dot(eu, ei) - simd::dot(eu, ej);
        loss.bpr += softplus(-margin);
        const double s = sigmoid(-margin);  // -d(loss)/d(margin)
        simd::axpy(-s, ei, gy_final.row(t.user));
        simd::axpy(s, ej, gy_final.row(t.user));
        simd::axpy(-s, eu, gx_final.row(pos));
        simd::axpy(s, eu, gx_final.row(neg));
    }

    // Every layer feeds the final sum directly, so each layer's gradient starts
    // from the final gradient and picks up what the next layer pushes back.
    Matrix gx = gx_final;
    Matrix gy = gy_final;
    std::vector<double> g_alpha(k_count, 0.0);
    for (int l = model.config.layers; l >= 1; --l) {
        const Matrix& x_prev = snapshot.entity_layers[l - 1];
        const Matrix& y_prev = snapshot.user_layers[l - 1];
        Matrix gx_prev = gx_final;
        Matrix gy_prev = gy_final;
        for (std::size_t k = 0; k < k_count; ++k) {
            const Matrix& encoded = snapshot.per_vrkg[l - 1][k];
            for (std::size_t h = 0; h < encoded.rows(); ++h) g_alpha[k] += simd::dot(gx.row(h), encoded.row(h));
            smooth_graph_adjoint(x_prev, model.partition.subgraphs[k], model.partition.incoming[k], x_prev,
                                 model.config.iterations, gx, snapshot.fusion_weights[k], gx_prev, gx_prev);
        }
        smooth_graph_adjoint(y_prev, model.users.user_entities, model.users.incoming, x_prev,
                             model.config.iterations, gy, 1.0, gy_prev, gx_prev);
        gx = std::move(gx_prev);
        gy = std::move(gy_prev);
    }
    grads.entity_emb = std::move(gx);
    grads.user_emb = std::move(gy);

    // softmax adjoint: dz_k = a_k (g_k - sum_j a_j g_j)
    const auto& alpha = snapshot.fusion_weights;
    double mean = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) mean += alpha[k] * g_alpha[k];
    for (std::size_t k = 0; k < k_count; ++k) grads.fusion_logits(0, k) = alpha[k] * (g_alpha[k] - mean);

    loss.l2 = l2_penalty(params, lambda, registry);
    add_l2_gradient(params, lambda, registry, grads);

    for (Block b : registry) {
        if (!grads.block(b).all_finite()) {
            throw numeric_error("non-finite gradient in parameter block '" + std::string(block_name(b)) + "'");
        }
    }
    return loss;
}

}  // namespace vrkg
