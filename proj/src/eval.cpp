#include "vrkg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "vrkg/error.hpp"
#include "vrkg/simd/kernels.hpp"

namespace vrkg {

const MetricRow& MetricsReport::at(std::size_t cutoff) const {
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        if (cutoffs[c] == cutoff) return rows[c];
    }
    throw config_error("cutoff " + std::to_string(cutoff) + " was not evaluated");
}

std::vector<ItemId> rank_items(std::span<const double> user_vec, const Matrix& entity_final,
                               std::span<const EntityId> item_entity,
                               std::span<const ItemId> train_positives, std::size_t limit) {
    std::vector<char> excluded(item_entity.size(), 0);
    for (ItemId i : train_positives) excluded[i] = 1;
    std::vector<std::pair<double, ItemId>> scored;
    scored.reserve(item_entity.size());
    for (ItemId i = 0; i < item_entity.size(); ++i) {
        if (!excluded[i]) scored.emplace_back(simd::dot(user_vec, entity_final.row(item_entity[i])), i);
    }
    auto better = [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    };
    const std::size_t keep = limit == 0 ? scored.size() : std::min(limit, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
    std::vector<ItemId> ranked(keep);
    for (std::size_t r = 0; r < keep; ++r) ranked[r] = scored[r].second;
    return ranked;
}

std::vector<MetricRow> compute_metrics(std::span<const ItemId> ranked, std::span<const ItemId> test_positives,
                                       std::span<const std::size_t> cutoffs) {
    std::vector<ItemId> positives(test_positives.begin(), test_positives.end());
    std::sort(positives.begin(), positives.end());
    const auto n_pos = static_cast<double>(positives.size());

    std::vector<MetricRow> rows;
    for (std::size_t cutoff : cutoffs) {
        const std::size_t depth = std::min(cutoff, ranked.size());
        std::size_t hits = 0;
        double dcg = 0.0;
        for (std::size_t r = 0; r < depth; ++r) {
            if (std::binary_search(positives.begin(), positives.end(), ranked[r])) {
                ++hits;
                dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
            }
        }
        double idcg = 0.0;
        for (std::size_t r = 0; r < std::min(cutoff, positives.size()); ++r) {
            idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        }
        MetricRow row;
        row.recall = static_cast<double>(hits) / n_pos;
        row.precision = static_cast<double>(hits) / static_cast<double>(cutoff);
        row.hr = hits > 0 ? 1.0 : 0.0;
        row.ndcg = idcg > 0.0 ? dcg / idcg : 0.0;
        rows.push_back(row);
    }
    return rows;
}

MetricsReport evaluate(const FinalRepresentations& finals, std::span<const EntityId> item_entity,
                       const SplitDataset& split, std::span<const std::size_t> cutoffs) {
    const std::size_t users = split.train.user_count;
    std::vector<std::vector<ItemId>> train_items(users);
    std::vector<std::vector<ItemId>> test_items(users);
    for (const auto& [u, i] : split.train.pairs) train_items[u].push_back(i);
    for (const auto& [u, i] : split.test.pairs) test_items[u].push_back(i);
    const std::size_t depth = cutoffs.empty() ? 0 : *std::max_element(cutoffs.begin(), cutoffs.end());

    std::vector<std::vector<MetricRow>> per_user(users);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t u = 0; u < static_cast<std::int64_t>(users); ++u) {
        if (test_items[u].empty()) continue;
        auto ranked = rank_items(finals.users.row(u), finals.entities, item_entity, train_items[u], depth);
        per_user[u] = compute_metrics(ranked, test_items[u], cutoffs);
    }

    MetricsReport report;
    report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
    report.rows.assign(cutoffs.size(), MetricRow{});
    for (std::size_t u = 0; u < users; ++u) {
        if (per_user[u].empty()) continue;
        ++report.users_evaluated;
        if (train_items[u].empty()) ++report.cold_users;
        for (std::size_t c = 0; c < cutoffs.size(); ++c) {
            report.rows[c].recall += per_user[u][c].recall;
            report.rows[c].ndcg += per_user[u][c].ndcg;
            report.rows[c].hr += per_user[u][c].hr;
            report.rows[c].precision += per_user[u][c].precision;
        }
    }
    if (report.users_evaluated > 0) {
        const auto n = static_cast<double>(report.users_evaluated);
        for (MetricRow& row : report.rows) {
            row.recall /= n;
            row.ndcg /= n;
            row.hr /= n;
            row.precision /= n;
        }
    }
    return report;
}

void write_report_csv(const std::filesystem::path& path, const MetricsReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    out << "cutoff,recall,ndcg,hr,precision,users_evaluated\n";
    char line[256];
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
        const MetricRow& r = report.rows[c];
        std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f,%zu\n", report.cutoffs[c], r.recall, r.ndcg,
                      r.hr, r.precision, report.users_evaluated);
        out << line;
    }
}

}  // namespace vrkg
