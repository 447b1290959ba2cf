#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace vrkg {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using UserId = std::uint32_t;
using ItemId = std::uint32_t;

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Compressed sparse rows over dense ids. Each row is sorted ascending.
struct Csr {
    std::vector<std::uint64_t> offsets{0};
    std::vector<std::uint32_t> targets;

    std::size_t rows() const noexcept { return offsets.size() - 1; }
    std::size_t edge_count() const noexcept { return targets.size(); }
    std::span<const std::uint32_t> row(std::size_t r) const noexcept {
        return {targets.data() + offsets[r], targets.data() + offsets[r + 1]};
    }
    std::size_t degree(std::size_t r) const noexcept { return offsets[r + 1] - offsets[r]; }

    friend bool operator==(const Csr&, const Csr&) = default;
};

/// Build a CSR from (row, target) pairs; duplicates are kept.
Csr build_csr(std::size_t rows, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

/// For every target node, the positions (into csr.targets) of the edges pointing
/// at it, ascending. Used to gather per-edge gradients without write conflicts.
Csr incoming_edge_index(const Csr& csr, std::size_t target_count);

/// Immutable triple store with head-major adjacency sorted by (relation, tail).
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    std::span<const Triple> triples() const noexcept { return triples_; }
    std::size_t entity_count() const noexcept { return entity_count_; }
    std::size_t relation_count() const noexcept { return relation_count_; }
    bool has_inverse() const noexcept { return has_inverse_; }
    /// Number of relations before inverse closure.
    std::size_t canonical_relation_count() const noexcept {
        return has_inverse_ ? relation_count_ / 2 : relation_count_;
    }

    /// Tails of (head, relation, *) in ascending order, repeated for duplicate triples.
    std::span<const EntityId> neighbors(EntityId head, RelationId relation) const;

    std::span<const RelationId> row_relations(EntityId head) const noexcept {
        return {edge_relation_.data() + offsets_[head], edge_relation_.data() + offsets_[head + 1]};
    }
    std::span<const EntityId> row_tails(EntityId head) const noexcept {
        return {edge_tail_.data() + offsets_[head], edge_tail_.data() + offsets_[head + 1]};
    }
    std::size_t adjacency_size() const noexcept { return edge_tail_.size(); }

    /// Triple count per relation id.
    std::vector<std::size_t> relation_counts() const;

    friend bool operator==(const KnowledgeGraph&, const KnowledgeGraph&) = default;

private:
    friend KnowledgeGraph build_kg(std::vector<Triple>, std::size_t, std::size_t);
    friend KnowledgeGraph add_inverse_relations(const KnowledgeGraph&);

    std::vector<Triple> triples_;
    std::size_t entity_count_ = 0;
    std::size_t relation_count_ = 0;
    bool has_inverse_ = false;
    std::vector<std::uint64_t> offsets_{0};
    std::vector<RelationId> edge_relation_;
    std::vector<EntityId> edge_tail_;
};

/// Throws Error(Data) naming the first triple index with an out-of-range id.
KnowledgeGraph build_kg(std::vector<Triple> triples, std::size_t entity_count,
                        std::size_t relation_count);

/// Appends (t, r + R, h) for every (h, r, t). Throws if already closed.
KnowledgeGraph add_inverse_relations(const KnowledgeGraph& kg);

/// Bounds-checked neighbor lookup; throws Error(Data) for out-of-range ids.
std::span<const EntityId> neighbors(const KnowledgeGraph& kg, EntityId entity, RelationId relation);

/// User -> item adjacency over training positives.
struct BipartiteGraph {
    Csr user_items;
    std::size_t item_count = 0;

    std::size_t user_count() const noexcept { return user_items.rows(); }
    std::size_t edge_count() const noexcept { return user_items.edge_count(); }
    std::span<const ItemId> items_of(UserId u) const noexcept { return user_items.row(u); }
};

/// Throws Error(Data) on out-of-range ids or duplicate (u, i) pairs.
BipartiteGraph build_bipartite(std::span<const std::pair<UserId, ItemId>> pairs,
                               std::size_t user_count, std::size_t item_count);

}  // namespace vrkg
