#include "vrkg/graph.hpp"

#include <algorithm>
#include <string>

#include "vrkg/error.hpp"

namespace vrkg {

Csr build_csr(std::size_t rows, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
    std::sort(edges.begin(), edges.end());
    Csr csr;
    csr.offsets.assign(rows + 1, 0);
    csr.targets.reserve(edges.size());
    for (const auto& [r, t] : edges) {
        ++csr.offsets[r + 1];
        csr.targets.push_back(t);
    }
    for (std::size_t r = 0; r < rows; ++r) csr.offsets[r + 1] += csr.offsets[r];
    return csr;
}

Csr incoming_edge_index(const Csr& csr, std::size_t target_count) {
    Csr in;
    in.offsets.assign(target_count + 1, 0);
    for (std::uint32_t t : csr.targets) ++in.offsets[t + 1];
    for (std::size_t t = 0; t < target_count; ++t) in.offsets[t + 1] += in.offsets[t];
    in.targets.resize(csr.targets.size());
    std::vector<std::uint64_t> cursor(in.offsets.begin(), in.offsets.end() - 1);
    // Edge positions are visited in ascending order, so each row ends up sorted.
    for (std::size_t e = 0; e < csr.targets.size(); ++e) {
        in.targets[cursor[csr.targets[e]]++] = static_cast<std::uint32_t>(e);
    }
    return in;
}

KnowledgeGraph build_kg(std::vector<Triple> triples, std::size_t entity_count,
                        std::size_t relation_count) {
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const Triple& t = triples[i];
        if (t.head >= entity_count || t.tail >= entity_count || t.relation >= relation_count) {
            throw data_error("triple " + std::to_string(i) + " (" + std::to_string(t.head) + ", " +
                             std::to_string(t.relation) + ", " + std::to_string(t.tail) +
                             ") is out of range for " + std::to_string(entity_count) +
                             " entities / " + std::to_string(relation_count) + " relations");
        }
    }

    KnowledgeGraph kg;
    kg.entity_count_ = entity_count;
    kg.relation_count_ = relation_count;

    std::vector<Triple> sorted = triples;
    std::sort(sorted.begin(), sorted.end());
    kg.offsets_.assign(entity_count + 1, 0);
    kg.edge_relation_.reserve(sorted.size());
    kg.edge_tail_.reserve(sorted.size());
    for (const Triple& t : sorted) {
        ++kg.offsets_[t.head + 1];
        kg.edge_relation_.push_back(t.relation);
        kg.edge_tail_.push_back(t.tail);
    }
    for (std::size_t h = 0; h < entity_count; ++h) kg.offsets_[h + 1] += kg.offsets_[h];
    kg.triples_ = std::move(triples);

    if (kg.adjacency_size() != kg.triples_.size()) {
        throw data_error("adjacency does not conserve the triple count");
    }
    return kg;
}

KnowledgeGraph add_inverse_relations(const KnowledgeGraph& kg) {
    if (kg.has_inverse_) throw data_error("inverse relations were already added to this graph");
    const auto r = static_cast<RelationId>(kg.relation_count_);
    std::vector<Triple> closed(kg.triples_.begin(), kg.triples_.end());
    closed.reserve(kg.triples_.size() * 2);
    for (const Triple& t : kg.triples_) closed.push_back({t.tail, t.relation + r, t.head});
    KnowledgeGraph out = build_kg(std::move(closed), kg.entity_count_, kg.relation_count_ * 2);
    out.has_inverse_ = true;
    return out;
}

std::span<const EntityId> KnowledgeGraph::neighbors(EntityId head, RelationId relation) const {
    auto rels = row_relations(head);
    auto [lo, hi] = std::equal_range(rels.begin(), rels.end(), relation);
    const auto base = offsets_[head];
    return {edge_tail_.data() + base + (lo - rels.begin()), edge_tail_.data() + base + (hi - rels.begin())};
}

std::vector<std::size_t> KnowledgeGraph::relation_counts() const {
    std::vector<std::size_t> counts(relation_count_, 0);
    for (RelationId r : edge_relation_) ++counts[r];
    return counts;
}

std::span<const EntityId> neighbors(const KnowledgeGraph& kg, EntityId entity, RelationId relation) {
    if (entity >= kg.entity_count() || relation >= kg.relation_count()) {
        throw data_error("neighbors(): entity " + std::to_string(entity) + " / relation " +
                         std::to_string(relation) + " out of range");
    }
    return kg.neighbors(entity, relation);
}

BipartiteGraph build_bipartite(std::span<const std::pair<UserId, ItemId>> pairs,
                               std::size_t user_count, std::size_t item_count) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(pairs.begin(), pairs.end());
    for (const auto& [u, i] : edges) {
        if (u >= user_count || i >= item_count) {
            throw data_error("interaction (" + std::to_string(u) + ", " + std::to_string(i) +
                             ") out of range");
        }
    }
    BipartiteGraph g;
    g.item_count = item_count;
    g.user_items = build_csr(user_count, std::move(edges));
    for (std::size_t u = 0; u < user_count; ++u) {
        auto row = g.user_items.row(u);
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw data_error("duplicate interaction for user " + std::to_string(u));
        }
    }
    return g;
}

}  // namespace vrkg
