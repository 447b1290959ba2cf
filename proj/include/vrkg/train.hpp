#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vrkg/eval.hpp"
#include "vrkg/ingest.hpp"
#include "vrkg/model.hpp"
#include "vrkg/params.hpp"
#include "vrkg/rng.hpp"
#include "vrkg/vrkg.hpp"

namespace vrkg {

struct BprTriple {
    UserId user;
    ItemId positive;
    ItemId negative;
};

enum class Ablation { None, SingleRelation, PerRelation, CustomK };

Ablation parse_ablation(std::string_view name);
std::string_view to_string(Ablation a);

struct TrainConfig {
    double lr = 1e-4;
    double l2 = 1e-5;
    std::size_t batch_size = 1024;
    int epochs = 1000;
    int eval_every = 10;
    int recluster_every = 10;
    int init_rounds = 10;
    int patience = 0;  // evaluations without recall@20 improvement; 0 disables
    std::uint64_t seed = 2023;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    ClusterStrategy strategy = ClusterStrategy::EntityGrounded;
    Ablation ablation = Ablation::None;
    bool verified = false;  // run the finite-difference gate before training
};

/// Draws negatives uniformly among items the user never interacted with
/// (train or test).
class NegativeSampler {
public:
    NegativeSampler(const InteractionSet& train, const InteractionSet& test);

    /// Throws Error(Data) when the user has interacted with every item.
    ItemId draw(UserId user, Rng& rng) const;
    bool is_positive(UserId user, ItemId item) const;

private:
    std::vector<std::vector<ItemId>> positives_;  // sorted per user
    std::size_t item_count_ = 0;
};

/// One negative per listed training pair.
std::vector<BprTriple> sample_batch(std::span<const std::pair<UserId, ItemId>> pairs,
                                    const NegativeSampler& sampler, Rng& rng);

/// `batch_size` pairs drawn uniformly with replacement from `train`, each with one negative.
std::vector<BprTriple> sample_batch(const InteractionSet& train, std::size_t batch_size,
                                    const NegativeSampler& sampler, Rng& rng);

/// log(1 + exp(x)) without overflow.
double softplus(double x);

/// sum over pairs of -ln sigmoid(pos - neg).
double bpr_loss(std::span<const double> pos_scores, std::span<const double> neg_scores);

/// Parameter blocks that are trained (and regularized) under a strategy. The
/// relation features are a derived buffer under the entity-grounded strategy.
std::vector<Block> trainable_blocks(ClusterStrategy strategy);

struct BatchLoss {
    double bpr = 0.0;
    double l2 = 0.0;
    double total() const { return bpr + l2; }
};

/// Forward pass plus loss, no gradients.
BatchLoss batch_loss(const ParameterSet& params, const ModelView& model, std::span<const BprTriple> batch,
                     double lambda, std::span<const Block> registry);

/// Exact gradient of bpr + l2 with respect to every registry block, given the
/// forward snapshot for `params`. `grads` is overwritten. Throws Error(Numeric)
/// naming the block if any gradient entry is not finite.
BatchLoss backward(const PropagationSnapshot& snapshot, const ParameterSet& params, const ModelView& model,
                   std::span<const BprTriple> batch, double lambda, std::span<const Block> registry,
                   GradientSet& grads);

struct AdamState {
    GradientSet m;
    GradientSet v;
    std::uint64_t step = 0;
};

AdamState make_adam_state(const ParameterSet& params);

void adam_step(ParameterSet& params, const GradientSet& grads, AdamState& state, const TrainConfig& config,
               std::span<const Block> registry);

struct GradientCheckEntry {
    Block block;
    std::size_t index;
    double analytic;
    double numeric;
    bool ok;
};

struct GradientCheckReport {
    std::vector<GradientCheckEntry> entries;
    std::size_t failures = 0;
    double worst_relative = 0.0;
};

/// Central differences on up to `max_per_block` coordinates of each registry
/// block (all of them when the block is smaller). Passes when
/// |a - n| <= rel_tol * max(|a|, |n|) or |a - n| <= abs_floor.
GradientCheckReport gradient_check(ParameterSet params, const ModelView& model, std::span<const BprTriple> batch,
                                   double lambda, std::span<const Block> registry, double step = 1e-4,
                                   double rel_tol = 1e-4, double abs_floor = 1e-7,
                                   std::size_t max_per_block = 0, std::uint64_t seed = 7);

/// Small synthetic problem (5 users, 8 items, 12 entities, 4 canonical relations,
/// K=2, Q=2, L=2, d=8) used by the finite-difference gate.
struct ToyProblem {
    KnowledgeGraph kg;
    BipartiteGraph train_graph;
    std::vector<EntityId> item_entity;
    ParameterSet params;
    VrkgPartition partition;
    UserGraph users;
    ModelConfig config;
    std::vector<BprTriple> batch;

    ModelView view() const { return {partition, users, item_entity, config}; }
};

ToyProblem make_toy_problem(std::uint64_t seed);

/// Runs gradient_check on the toy problem under the static strategy (every block
/// trainable); throws Error(Numeric) on failure.
GradientCheckReport verify_gradients_on_toy_model();

struct TrainingData {
    SplitDataset split;
    BipartiteGraph train_graph;
    std::vector<EntityId> item_entity;
};

TrainingData make_training_data(SplitDataset split, std::vector<EntityId> item_entity);

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;  // mean BPR loss per training triple
    std::optional<MetricsReport> report;
};

struct TrainResult {
    ParameterSet params;
    RelationAssignment assignment;
    ModelConfig model;
    std::vector<EpochLog> history;
    MetricsReport final_report;
};

/// Virtual relation count after applying the ablation mode.
std::size_t effective_virtual_count(const ModelConfig& model, Ablation ablation, std::size_t relation_count);

/// Initial parameters and clustering, exactly as train() sets them up.
struct TrainingState {
    ParameterSet params;
    RelationAssignment assignment;
    ModelConfig model;
};
TrainingState initial_state(const TrainingData& data, const KnowledgeGraph& kg, ModelConfig model,
                            const TrainConfig& config);

/// Re-derives entity-grounded relation features and runs one assign + update round.
RelationAssignment recluster(const KnowledgeGraph& kg, ParameterSet& params, ClusterStrategy strategy);

TrainResult train(const TrainingData& data, const KnowledgeGraph& kg, const ModelConfig& model,
                  const TrainConfig& config, const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace vrkg
