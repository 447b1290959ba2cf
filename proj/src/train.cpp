#include "vrkg/train.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "vrkg/error.hpp"
#include "vrkg/simd/kernels.hpp"

namespace vrkg {

Ablation parse_ablation(std::string_view name) {
    if (name == "none") return Ablation::None;
    if (name == "k1") return Ablation::SingleRelation;
    if (name == "per-relation") return Ablation::PerRelation;
    if (name == "custom-K" || name == "custom-k") return Ablation::CustomK;
    throw config_error("unknown ablation '" + std::string(name) + "' (expected none|k1|per-relation|custom-K)");
}

std::string_view to_string(Ablation a) {
    switch (a) {
        case Ablation::None: return "none";
        case Ablation::SingleRelation: return "k1";
        case Ablation::PerRelation: return "per-relation";
        case Ablation::CustomK: return "custom-K";
    }
    return "none";
}

NegativeSampler::NegativeSampler(const InteractionSet& train, const InteractionSet& test)
    : positives_(train.user_count), item_count_(train.item_count) {
    for (const auto& [u, i] : train.pairs) positives_[u].push_back(i);
    for (const auto& [u, i] : test.pairs) positives_[u].push_back(i);
    for (auto& items : positives_) {
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
    }
}

bool NegativeSampler::is_positive(UserId user, ItemId item) const {
    const auto& items = positives_[user];
    return std::binary_search(items.begin(), items.end(), item);
}

ItemId NegativeSampler::draw(UserId user, Rng& rng) const {
    if (positives_[user].size() >= item_count_) {
        throw data_error("user " + std::to_string(user) + " has interacted with every item; no negative exists");
    }
    for (;;) {
        const auto j = static_cast<ItemId>(rng.below(item_count_));
        if (!is_positive(user, j)) return j;
    }
}

std::vector<BprTriple> sample_batch(std::span<const std::pair<UserId, ItemId>> pairs,
                                    const NegativeSampler& sampler, Rng& rng) {
    std::vector<BprTriple> batch;
    batch.reserve(pairs.size());
    for (const auto& [u, i] : pairs) batch.push_back({u, i, sampler.draw(u, rng)});
    return batch;
}

std::vector<BprTriple> sample_batch(const InteractionSet& train, std::size_t batch_size,
                                    const NegativeSampler& sampler, Rng& rng) {
    if (train.pairs.empty()) throw data_error("cannot sample from an empty training set");
    std::vector<BprTriple> batch;
    batch.reserve(batch_size);
    for (std::size_t n = 0; n < batch_size; ++n) {
        const auto& [u, i] = train.pairs[rng.below(train.pairs.size())];
        batch.push_back({u, i, sampler.draw(u, rng)});
    }
    return batch;
}

AdamState make_adam_state(const ParameterSet& params) {
    return AdamState{zeros_like(params), zeros_like(params), 0};
}

void adam_step(ParameterSet& params, const GradientSet& grads, AdamState& state, const TrainConfig& config,
               std::span<const Block> registry) {
    ++state.step;
    const auto t = static_cast<double>(state.step);
    const simd::AdamCoeffs c{config.lr, config.beta1, config.beta2, config.eps,
                             1.0 - std::pow(config.beta1, t), 1.0 - std::pow(config.beta2, t)};
    for (Block b : registry) {
        auto theta = params.block(b).flat();
        simd::active().adam(theta.data(), state.m.block(b).data(), state.v.block(b).data(),
                            grads.block(b).data(), theta.size(), c);
    }
}

TrainingData make_training_data(SplitDataset split, std::vector<EntityId> item_entity) {
    TrainingData data;
    data.train_graph = build_bipartite(split.train.pairs, split.train.user_count, split.train.item_count);
    data.split = std::move(split);
    data.item_entity = std::move(item_entity);
    return data;
}

std::size_t effective_virtual_count(const ModelConfig& model, Ablation ablation, std::size_t relation_count) {
    switch (ablation) {
        case Ablation::SingleRelation: return 1;
        case Ablation::PerRelation: return relation_count;
        default: return model.virtual_count;
    }
}

TrainingState initial_state(const TrainingData& data, const KnowledgeGraph& kg, ModelConfig model,
                            const TrainConfig& config) {
    if (model.layers < 0 || model.iterations < 1 || model.dim < 1) {
        throw config_error("layers must be >= 0, iterations >= 1 and dim >= 1");
    }
    model.virtual_count = effective_virtual_count(model, config.ablation, kg.relation_count());
    if (model.virtual_count < 1) throw config_error("the number of virtual relations must be >= 1");

    TrainingState state;
    state.model = model;
    state.params = init_params(data.split.train.user_count, kg.entity_count(), kg.relation_count(), model.dim,
                               model.virtual_count, config.seed);
    if (config.ablation == Ablation::PerRelation) {
        state.assignment = identity_assignment(kg.relation_count());
        return state;
    }
    Matrix features = relation_features(kg, state.params, config.strategy);
    if (config.strategy == ClusterStrategy::EntityGrounded) state.params.relation_feat = features;
    state.assignment = alternate_clustering(features, state.params.centroids, std::max(1, config.init_rounds)).assignment;
    return state;
}

RelationAssignment recluster(const KnowledgeGraph& kg, ParameterSet& params, ClusterStrategy strategy) {
    Matrix features = relation_features(kg, params, strategy);
    if (strategy == ClusterStrategy::EntityGrounded) params.relation_feat = features;
    return alternate_clustering(features, params.centroids, 1).assignment;
}

TrainResult train(const TrainingData& data, const KnowledgeGraph& kg, const ModelConfig& model_config,
                  const TrainConfig& config, const std::function<void(const EpochLog&)>& on_epoch) {
    if (config.batch_size == 0 || config.eval_every < 1 || config.epochs < 0 || !(config.lr > 0.0) ||
        config.l2 < 0.0) {
        throw config_error("invalid training configuration");
    }
    if (data.item_entity.size() != data.split.train.item_count) {
        throw data_error("item alignment does not cover every item");
    }
    if (config.verified) {
        const auto check = verify_gradients_on_toy_model();
        log_info("gradient check passed on " + std::to_string(check.entries.size()) + " coordinates");
    }

    TrainingState state = initial_state(data, kg, model_config, config);
    ParameterSet& params = state.params;
    const ModelConfig& model = state.model;
    const std::vector<Block> registry = trainable_blocks(config.strategy);
    VrkgPartition partition = partition_graph(kg, state.assignment);
    const UserGraph users = make_user_graph(data.train_graph, data.item_entity, kg.entity_count());
    const NegativeSampler sampler(data.split.train, data.split.test);
    const bool reclusters = config.strategy == ClusterStrategy::EntityGrounded &&
                            config.ablation != Ablation::PerRelation && config.recluster_every > 0;

    auto run_eval = [&]() {
        const ModelView view{partition, users, data.item_entity, model};
        return evaluate(final_representations(forward(params, view)), data.item_entity, data.split,
                        kDefaultCutoffs);
    };

    Rng rng(derive_seed(config.seed, 100));
    AdamState adam = make_adam_state(params);
    GradientSet grads;
    const auto& train_pairs = data.split.train.pairs;
    std::vector<std::pair<UserId, ItemId>> order(train_pairs.begin(), train_pairs.end());

    TrainResult result;
    double best_recall = -1.0;
    int stale = 0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (reclusters && epoch > 1 && (epoch - 1) % config.recluster_every == 0) {
            state.assignment = recluster(kg, params, config.strategy);
            partition = partition_graph(kg, state.assignment);
        }
        rng.shuffle(std::span<std::pair<UserId, ItemId>>(order));

        double loss_sum = 0.0;
        const ModelView view{partition, users, data.item_entity, model};
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            const auto batch = sample_batch(std::span(order).subspan(begin, end - begin), sampler, rng);
            const BatchLoss loss = backward(forward(params, view), params, view, batch, config.l2, registry, grads);
            loss_sum += loss.bpr;
            adam_step(params, grads, adam, config, registry);
            if (!params.all_finite()) throw numeric_error("parameters became non-finite at epoch " + std::to_string(epoch));
        }

        EpochLog log;
        log.epoch = epoch;
        log.loss = order.empty() ? 0.0 : loss_sum / static_cast<double>(order.size());
        const bool last = epoch == config.epochs;
        if (epoch % config.eval_every == 0 || last) log.report = run_eval();
        result.history.push_back(log);
        if (on_epoch) on_epoch(log);

        if (log.report && config.patience > 0) {
            const double recall = log.report->at(20).recall;
            if (recall > best_recall) {
                best_recall = recall;
                stale = 0;
            } else if (++stale >= config.patience) {
                if (!last) log_info("early stop at epoch " + std::to_string(epoch));
                break;
            }
        }
    }

    // Every run ends with an evaluation; with zero epochs it is logged as epoch 0.
    if (result.history.empty()) {
        EpochLog log;
        log.report = run_eval();
        result.history.push_back(log);
        if (on_epoch) on_epoch(log);
    }
    result.final_report = *result.history.back().report;
    result.params = std::move(params);
    result.assignment = std::move(state.assignment);
    result.model = model;
    return result;
}

}  // namespace vrkg
