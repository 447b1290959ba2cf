#include "vrkg/params.hpp"

#include <algorithm>
#include <cmath>

#include "vrkg/rng.hpp"
#include "vrkg/simd/kernels.hpp"

namespace vrkg {

std::string_view block_name(Block b) {
    switch (b) {
        case Block::User: return "user_emb";
        case Block::Entity: return "entity_emb";
        case Block::Relation: return "relation_feat";
        case Block::Centroid: return "centroids";
        case Block::Fusion: return "fusion_logits";
    }
    return "?";
}

Matrix& ParameterSet::block(Block b) {
    return const_cast<Matrix&>(static_cast<const ParameterSet&>(*this).block(b));
}

const Matrix& ParameterSet::block(Block b) const {
    switch (b) {
        case Block::User: return user_emb;
        case Block::Entity: return entity_emb;
        case Block::Relation: return relation_feat;
        case Block::Centroid: return centroids;
        case Block::Fusion: break;
    }
    return fusion_logits;
}

bool ParameterSet::all_finite() const {
    return std::all_of(kAllBlocks.begin(), kAllBlocks.end(),
                       [&](Block b) { return block(b).all_finite(); });
}

GradientSet zeros_like(const ParameterSet& params) {
    GradientSet g;
    for (Block b : kAllBlocks) g.block(b) = Matrix(params.block(b).rows(), params.block(b).cols());
    return g;
}

ParameterSet init_params(std::size_t users, std::size_t entities, std::size_t relations,
                         std::size_t dim, std::size_t virtual_count, std::uint64_t seed) {
    ParameterSet p;
    p.user_emb = Matrix(users, dim);
    p.entity_emb = Matrix(entities, dim);
    p.relation_feat = Matrix(relations, dim);
    p.centroids = Matrix(virtual_count, dim);
    p.fusion_logits = Matrix(1, virtual_count, 0.0);

    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    std::uint64_t tag = 1;
    for (Block b : {Block::User, Block::Entity, Block::Relation, Block::Centroid}) {
        Rng rng(derive_seed(seed, tag++));
        for (double& v : p.block(b).flat()) v = rng.uniform(-bound, bound);
    }
    for (std::size_t k = 0; k < virtual_count; ++k) {
        auto row = p.centroids.row(k);
        const double norm = std::sqrt(simd::dot(row, row));
        if (norm > 0.0) simd::scale(1.0 / norm, row);
    }
    return p;
}

double l2_penalty(const ParameterSet& params, double lambda, std::span<const Block> blocks) {
    double sum = 0.0;
    for (Block b : blocks) sum += params.block(b).squared_norm();
    return lambda * sum;
}

void add_l2_gradient(const ParameterSet& params, double lambda, std::span<const Block> blocks,
                     GradientSet& grads) {
    for (Block b : blocks) simd::axpy(2.0 * lambda, params.block(b).flat(), grads.block(b).flat());
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double top = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) total += out[k] = std::exp(logits[k] - top);
    for (double& v : out) v /= total;
    return out;
}

}  // namespace vrkg
