#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "vrkg/ingest.hpp"
#include "vrkg/model.hpp"

namespace vrkg {

inline const std::vector<std::size_t> kDefaultCutoffs{1, 5, 10, 20};

struct MetricRow {
    double recall = 0.0;
    double ndcg = 0.0;
    double hr = 0.0;
    double precision = 0.0;
};

struct MetricsReport {
    std::vector<std::size_t> cutoffs;
    std::vector<MetricRow> rows;  // one per cutoff
    std::size_t users_evaluated = 0;
    std::size_t cold_users = 0;   // evaluated users without training pairs

    const MetricRow& at(std::size_t cutoff) const;
};

/// Items ordered by descending score, ascending id on ties, with the user's
/// training positives removed. `limit` truncates the list (0 = full ranking).
std::vector<ItemId> rank_items(std::span<const double> user_vec, const Matrix& entity_final,
                               std::span<const EntityId> item_entity,
                               std::span<const ItemId> train_positives, std::size_t limit = 0);

/// Binary-relevance metrics of one ranking; `test_positives` must be non-empty.
std::vector<MetricRow> compute_metrics(std::span<const ItemId> ranked, std::span<const ItemId> test_positives,
                                       std::span<const std::size_t> cutoffs);

/// Unweighted mean over users with at least one test positive.
MetricsReport evaluate(const FinalRepresentations& finals, std::span<const EntityId> item_entity,
                       const SplitDataset& split, std::span<const std::size_t> cutoffs);

/// Columns cutoff,recall,ndcg,hr,precision,users_evaluated with 6 decimals.
void write_report_csv(const std::filesystem::path& path, const MetricsReport& report);

}  // namespace vrkg
