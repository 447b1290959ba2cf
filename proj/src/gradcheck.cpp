#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vrkg/error.hpp"
#include "vrkg/train.hpp"

namespace vrkg {

GradientCheckReport gradient_check(ParameterSet params, const ModelView& model, std::span<const BprTriple> batch,
                                   double lambda, std::span<const Block> registry, double step, double rel_tol,
                                   double abs_floor, std::size_t max_per_block, std::uint64_t seed) {
    GradientSet analytic;
    backward(forward(params, model), params, model, batch, lambda, registry, analytic);

    GradientCheckReport report;
    Rng rng(seed);
    for (Block b : registry) {
        auto values = params.block(b).flat();
        std::vector<std::size_t> coords(values.size());
        std::iota(coords.begin(), coords.end(), 0);
        if (max_per_block != 0 && coords.size() > max_per_block) {
            rng.shuffle(std::span<std::size_t>(coords));
            coords.resize(max_per_block);
            std::sort(coords.begin(), coords.end());
        }
        for (std::size_t idx : coords) {
            const double saved = values[idx];
            values[idx] = saved + step;
            const double plus = batch_loss(params, model, batch, lambda, registry).total();
            values[idx] = saved - step;
            const double minus = batch_loss(params, model, batch, lambda, registry).total();
            values[idx] = saved;

            GradientCheckEntry e{b, idx, analytic.block(b).flat()[idx], (plus - minus) / (2.0 * step), false};
            const double diff = std::abs(e.analytic - e.numeric);
            const double scale = std::max(std::abs(e.analytic), std::abs(e.numeric));
            e.ok = diff <= rel_tol * scale || diff <= abs_floor;
            if (scale > 0.0 && diff > abs_floor) report.worst_relative = std::max(report.worst_relative, diff / scale);
            if (!e.ok) ++report.failures;
            report.entries.push_back(e);
        }
    }
    return report;
}

ToyProblem make_toy_problem(std::uint64_t seed) {
    constexpr std::size_t kUsers = 5, kItems = 8, kEntities = 12, kRelations = 4;
    Rng rng(seed);
    ToyProblem toy;
    toy.config = ModelConfig{.layers = 2, .iterations = 2, .virtual_count = 2, .dim = 8};

    std::vector<Triple> triples;
    for (int n = 0; n < 14; ++n) {
        triples.push_back({static_cast<EntityId>(rng.below(kEntities)), static_cast<RelationId>(rng.below(kRelations)),
                           static_cast<EntityId>(rng.below(kEntities))});
    }
    toy.kg = add_inverse_relations(build_kg(std::move(triples), kEntities, kRelations));

    std::vector<std::pair<UserId, ItemId>> pairs;
    for (UserId u = 0; u < kUsers; ++u) {
        for (ItemId i = 0; i < kItems; ++i) {
            if ((u + 2 * i) % 3 == 0 || i == u) pairs.emplace_back(u, i);
        }
    }
    toy.train_graph = build_bipartite(pairs, kUsers, kItems);
    toy.item_entity.resize(kItems);
    std::iota(toy.item_entity.begin(), toy.item_entity.end(), 0);

    toy.params = init_params(kUsers, kEntities, toy.kg.relation_count(), toy.config.dim,
                             toy.config.virtual_count, derive_seed(seed, 1));
    // Scale embeddings up so the propagation is well inside its nonlinear range.
    for (Block b : {Block::User, Block::Entity}) {
        for (double& v : toy.params.block(b).flat()) v *= 2.5;
    }
    toy.params.fusion_logits(0, 0) = 0.3;
    toy.params.fusion_logits(0, 1) = -0.2;

    Matrix centroids = toy.params.centroids;
    auto run = alternate_clustering(toy.params.relation_feat, centroids, 3);
    toy.params.centroids = centroids;
    toy.partition = partition_graph(toy.kg, run.assignment);
    toy.users = make_user_graph(toy.train_graph, toy.item_entity, kEntities);

    for (const auto& [u, i] : pairs) {
        ItemId j = static_cast<ItemId>(rng.below(kItems));
        while (std::find(pairs.begin(), pairs.end(), std::pair<UserId, ItemId>{u, j}) != pairs.end()) {
            j = static_cast<ItemId>(rng.below(kItems));
        }
        toy.batch.push_back({u, i, j});
    }
    return toy;
}

GradientCheckReport verify_gradients_on_toy_model() {
    const ToyProblem toy = make_toy_problem(11);
    const auto registry = trainable_blocks(ClusterStrategy::Static);
    GradientCheckReport report = gradient_check(toy.params, toy.view(), toy.batch, 1e-5, registry);
    if (report.failures > 0) {
        throw numeric_error("gradient check failed on " + std::to_string(report.failures) + " of " +
                            std::to_string(report.entries.size()) + " coordinates");
    }
    return report;
}

}  // namespace vrkg
