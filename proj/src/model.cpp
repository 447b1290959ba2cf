#include "vrkg/model.hpp"

#include <cstdint>
#include <string>

#include "vrkg/error.hpp"
#include "vrkg/lws.hpp"
#include "vrkg/simd/kernels.hpp"

namespace vrkg {

UserGraph make_user_graph(const BipartiteGraph& bipartite, std::span<const EntityId> item_entity,
                          std::size_t entity_count) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(bipartite.edge_count());
    std::size_t isolated = 0;
    for (UserId u = 0; u < bipartite.user_count(); ++u) {
        if (bipartite.items_of(u).empty()) ++isolated;
        for (ItemId i : bipartite.items_of(u)) edges.emplace_back(u, item_entity[i]);
    }
    if (isolated > 0) {
        log_warning(std::to_string(isolated) + " users have no training interactions and are only self-smoothed");
    }
    UserGraph g;
    g.user_entities = build_csr(bipartite.user_count(), std::move(edges));
    g.incoming = incoming_edge_index(g.user_entities, entity_count);
    return g;
}

Matrix encode_entities_layer(const PropagationSnapshot& snapshot, const VrkgPartition& partition,
                             int layer, int iterations, std::vector<Matrix>* per_vrkg) {
    const Matrix& prev = snapshot.entity_layers.at(layer - 1);
    Matrix fused(prev.rows(), prev.cols());
    std::vector<Matrix> local;
    std::vector<Matrix>& buffers = per_vrkg != nullptr ? *per_vrkg : local;
    buffers.assign(partition.virtual_count(), Matrix());
    for (std::size_t k = 0; k < partition.virtual_count(); ++k) {
        lws_smooth_graph(prev, partition.subgraphs[k], prev, iterations, buffers[k]);
        simd::axpy(snapshot.fusion_weights[k], buffers[k].flat(), fused.flat());
    }
    return fused;
}

Matrix encode_users_layer(const PropagationSnapshot& snapshot, const UserGraph& users, int layer,
                          int iterations) {
    Matrix out;
    lws_smooth_graph(snapshot.user_layers.at(layer - 1), users.user_entities,
                     snapshot.entity_layers.at(layer - 1), iterations, out);
    return out;
}

PropagationSnapshot forward(const ParameterSet& params, const ModelView& model) {
    PropagationSnapshot snap;
    snap.fusion_weights = softmax(params.fusion_logits.flat());
    snap.entity_layers.push_back(params.entity_emb);
    snap.user_layers.push_back(params.user_emb);
    for (int l = 1; l <= model.config.layers; ++l) {
        // Both sides read only layer l - 1.
        std::vector<Matrix> buffers;
        Matrix entities = encode_entities_layer(snap, model.partition, l, model.config.iterations, &buffers);
        Matrix users = encode_users_layer(snap, model.users, l, model.config.iterations);
        snap.per_vrkg.push_back(std::move(buffers));
        snap.entity_layers.push_back(std::move(entities));
        snap.user_layers.push_back(std::move(users));
    }
    return snap;
}

FinalRepresentations final_representations(const PropagationSnapshot& snapshot) {
    FinalRepresentations out{snapshot.user_layers.front(), snapshot.entity_layers.front()};
    for (std::size_t l = 1; l < snapshot.entity_layers.size(); ++l) {
        simd::axpy(1.0, snapshot.user_layers[l].flat(), out.users.flat());
        simd::axpy(1.0, snapshot.entity_layers[l].flat(), out.entities.flat());
    }
    return out;
}

double predict(const FinalRepresentations& finals, std::span<const EntityId> item_entity, UserId user,
               ItemId item) {
    return simd::dot(finals.users.row(user), finals.entities.row(item_entity[item]));
}

}  // namespace vrkg
