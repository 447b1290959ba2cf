#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vrkg/graph.hpp"

namespace vrkg {

using RawId = std::int64_t;

/// Dense <-> raw id maps. Dense ids follow ascending raw id order. Items own
/// entity ids [0, item_count) so item i is aligned with entity i; KG-only
/// entities follow in ascending raw id order.
struct IdMaps {
    std::vector<RawId> user_raw;
    std::vector<RawId> item_raw;
    std::vector<RawId> entity_raw;
    std::vector<RawId> relation_raw;  // canonical relations only
    std::unordered_map<RawId, UserId> user_index;
    std::unordered_map<RawId, ItemId> item_index;
    std::unordered_map<RawId, EntityId> entity_index;
    std::unordered_map<RawId, RelationId> relation_index;
    std::vector<EntityId> item_entity;
};

struct InteractionSet {
    std::vector<std::pair<UserId, ItemId>> pairs;  // sorted, unique
    std::size_t user_count = 0;
    std::size_t item_count = 0;
};

struct LoadedInteractions {
    InteractionSet interactions;
    IdMaps maps;
};

struct SplitDataset {
    InteractionSet train;
    InteractionSet test;
    std::uint64_t seed = 0;
};

/// Lines are "user<TAB>item[<TAB>rating]"; any listed pair is a positive.
/// Throws Error(Data) on malformed lines (with the line number) or empty input.
LoadedInteractions load_interactions(const std::filesystem::path& path);

/// Lines are "head<TAB>relation<TAB>tail". Raw entity ids equal to a raw item id
/// resolve to that item's entity. Extends `maps` with entities and relations and
/// returns the graph with inverse relations added.
KnowledgeGraph load_triples(const std::filesystem::path& path, IdMaps& maps);

/// Seeded uniform split over pairs: floor(ratio * n) pairs go to train. With
/// `per_user`, each user's items are split separately and every user with at
/// least one interaction keeps one training pair.
SplitDataset split(const InteractionSet& interactions, std::uint64_t seed, double ratio = 0.8,
                   bool per_user = false);

/// Users with test pairs but no training pairs.
std::size_t count_cold_users(const SplitDataset& split);

/// FNV-1a 64-bit over the file bytes, as 16 hex digits.
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace vrkg
