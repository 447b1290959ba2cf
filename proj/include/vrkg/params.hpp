#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vrkg/matrix.hpp"

namespace vrkg {

enum class Block { User, Entity, Relation, Centroid, Fusion };

inline constexpr std::array<Block, 5> kAllBlocks{Block::User, Block::Entity, Block::Relation,
                                                 Block::Centroid, Block::Fusion};

std::string_view block_name(Block b);

/// Every trainable array of the model. Items have no storage of their own: item
/// i reads entity row item_entity[i].
struct ParameterSet {
    Matrix user_emb;       // M x d
    Matrix entity_emb;     // |E| x d
    Matrix relation_feat;  // |R| x d
    Matrix centroids;      // K x d
    Matrix fusion_logits;  // 1 x K, softmax gives the fusion weights

    Matrix& block(Block b);
    const Matrix& block(Block b) const;

    std::size_t dim() const noexcept { return entity_emb.cols(); }
    std::size_t virtual_count() const noexcept { return fusion_logits.cols(); }
    bool all_finite() const;

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

/// Additive accumulators with the same shapes as ParameterSet.
using GradientSet = ParameterSet;

GradientSet zeros_like(const ParameterSet& params);

/// Embeddings, relation features and centroids are uniform in [-1/sqrt(d), 1/sqrt(d)];
/// centroid rows are then scaled to unit length. Fusion logits start at zero.
ParameterSet init_params(std::size_t users, std::size_t entities, std::size_t relations,
                         std::size_t dim, std::size_t virtual_count, std::uint64_t seed);

/// lambda * sum of squares over the listed blocks.
double l2_penalty(const ParameterSet& params, double lambda, std::span<const Block> blocks);

/// grads += 2 * lambda * params over the listed blocks.
void add_l2_gradient(const ParameterSet& params, double lambda, std::span<const Block> blocks,
                     GradientSet& grads);

std::vector<double> softmax(std::span<const double> logits);

}  // namespace vrkg
