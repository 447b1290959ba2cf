#pragma once

// Shared test helpers: random small problems, their library-side counterparts,
// fixture paths and scratch directories.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <unistd.h>
#include <vector>

#include "naive_reference.hpp"
#include "vrkg/graph.hpp"
#include "vrkg/model.hpp"
#include "vrkg/params.hpp"
#include "vrkg/rng.hpp"
#include "vrkg/vrkg.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return VRKG_TEST_DATA_DIR; }
inline std::filesystem::path toy_dir() { return data_dir() / "toy"; }

/// Fresh empty directory under the system temp dir; removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("vrkg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<double> random_vector(vrkg::Rng& rng, std::size_t d, double scale = 1.0) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
}

/// At most 30 nodes in total (users + entities).
inline naive::Problem random_problem(std::uint64_t seed) {
    vrkg::Rng rng(seed);
    naive::Problem p;
    const std::size_t entities = 2 + rng.below(17);
    const std::size_t items = 1 + rng.below(entities);
    const std::size_t users = 1 + rng.below(std::min<std::size_t>(12, 30 - entities));
    const std::size_t K = 1 + rng.below(4);
    p.relation_count = 1 + rng.below(4);
    p.dim = 1 + rng.below(8);
    p.layers = static_cast<int>(rng.below(4));
    p.iterations = 1 + static_cast<int>(rng.below(3));
    const double scale = std::array<double, 3>{0.3, 1.0, 2.0}[rng.below(3)];

    for (std::size_t u = 0; u < users; ++u) p.users.push_back(random_vector(rng, p.dim, scale));
    for (std::size_t e = 0; e < entities; ++e) p.entities.push_back(random_vector(rng, p.dim, scale));
    for (std::size_t k = 0; k < K; ++k) p.logits.push_back(rng.uniform(-1.0, 1.0));

    const std::size_t triple_count = rng.below(3 * entities);
    for (std::size_t i = 0; i < triple_count; ++i) {
        p.triples.push_back({static_cast<std::uint32_t>(rng.below(entities)),
                             static_cast<std::uint32_t>(rng.below(p.relation_count)),
                             static_cast<std::uint32_t>(rng.below(entities))});
    }
    for (std::size_t r = 0; r < 2 * p.relation_count; ++r)
        p.virtual_of.push_back(static_cast<std::uint32_t>(rng.below(K)));

    for (std::uint32_t u = 0; u < users; ++u)
        for (std::uint32_t i = 0; i < items; ++i)
            if (rng.unit() < 0.3) p.interactions.emplace_back(u, i);

    std::vector<std::uint32_t> ids(entities);
    std::iota(ids.begin(), ids.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(ids));
    p.item_entity.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(items));
    return p;
}

inline vrkg::Matrix to_matrix(const std::vector<naive::Vec>& rows, std::size_t d) {
    vrkg::Matrix m(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    return m;
}

/// The same problem expressed with library structures.
struct LibraryModel {
    vrkg::KnowledgeGraph kg;
    vrkg::VrkgPartition partition;
    vrkg::BipartiteGraph bipartite;
    vrkg::UserGraph users;
    std::vector<vrkg::EntityId> item_entity;
    vrkg::ParameterSet params;
    vrkg::ModelConfig config;

    vrkg::ModelView view() const { return {partition, users, item_entity, config}; }
};

inline LibraryModel to_library(const naive::Problem& p) {
    LibraryModel m;
    std::vector<vrkg::Triple> triples;
    for (const auto& t : p.triples) triples.push_back({t[0], t[1], t[2]});
    m.kg = vrkg::add_inverse_relations(vrkg::build_kg(triples, p.entities.size(), p.relation_count));
    vrkg::RelationAssignment assignment;
    assignment.assign = p.virtual_of;
    assignment.virtual_count = p.logits.size();
    m.partition = vrkg::partition_graph(m.kg, assignment);
    const std::size_t items = p.item_entity.size();
    m.bipartite = vrkg::build_bipartite(p.interactions, p.users.size(), items);
    m.item_entity = p.item_entity;
    m.users = vrkg::make_user_graph(m.bipartite, m.item_entity, p.entities.size());
    m.params.user_emb = to_matrix(p.users, p.dim);
    m.params.entity_emb = to_matrix(p.entities, p.dim);
    m.params.relation_feat = vrkg::Matrix(2 * p.relation_count, p.dim);
    m.params.centroids = vrkg::Matrix(p.logits.size(), p.dim);
    m.params.fusion_logits = vrkg::Matrix(1, p.logits.size());
    for (std::size_t k = 0; k < p.logits.size(); ++k) m.params.fusion_logits(0, k) = p.logits[k];
    m.config = {p.layers, p.iterations, p.logits.size(), p.dim};
    return m;
}

inline double max_diff(const vrkg::Matrix& m, const std::vector<naive::Vec>& rows) {
    double worst = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) worst = std::max(worst, std::abs(m(r, c) - rows[r][c]));
    return worst;
}

}  // namespace testing
