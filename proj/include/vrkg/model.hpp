#pragma once

#include <span>
#include <vector>

#include "vrkg/graph.hpp"
#include "vrkg/matrix.hpp"
#include "vrkg/params.hpp"
#include "vrkg/vrkg.hpp"

namespace vrkg {

struct ModelConfig {
    int layers = 2;                 // L
    int iterations = 3;             // Q
    std::size_t virtual_count = 3;  // K
    std::size_t dim = 64;           // d
};

/// Training interactions expressed as user -> entity rows, with the reverse index.
struct UserGraph {
    Csr user_entities;
    Csr incoming;  // entity -> edge positions in user_entities
};

UserGraph make_user_graph(const BipartiteGraph& bipartite, std::span<const EntityId> item_entity,
                          std::size_t entity_count);

/// Everything the forward pass reads besides the parameters.
struct ModelView {
    const VrkgPartition& partition;
    const UserGraph& users;
    std::span<const EntityId> item_entity;
    ModelConfig config;
};

struct PropagationSnapshot {
    std::vector<Matrix> entity_layers;         // L + 1 matrices, |E| x d
    std::vector<Matrix> user_layers;           // L + 1 matrices, M x d
    std::vector<std::vector<Matrix>> per_vrkg; // [l - 1][k]: pre-fusion entity encodings
    std::vector<double> fusion_weights;        // softmax of the fusion logits
};

struct FinalRepresentations {
    Matrix users;
    Matrix entities;
};

/// Layer l (>= 1) entity encodings from layer l - 1, fused over virtual relations.
/// Writes the per-virtual-relation encodings into `per_vrkg` when non-null.
Matrix encode_entities_layer(const PropagationSnapshot& snapshot, const VrkgPartition& partition,
                             int layer, int iterations, std::vector<Matrix>* per_vrkg = nullptr);

/// Layer l (>= 1) user encodings, smoothing over the layer l - 1 item vectors.
Matrix encode_users_layer(const PropagationSnapshot& snapshot, const UserGraph& users, int layer,
                          int iterations);

PropagationSnapshot forward(const ParameterSet& params, const ModelView& model);

/// Sum of all layers, separately for users and entities.
FinalRepresentations final_representations(const PropagationSnapshot& snapshot);

double predict(const FinalRepresentations& finals, std::span<const EntityId> item_entity, UserId user,
               ItemId item);

}  // namespace vrkg
