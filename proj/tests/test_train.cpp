#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "vrkg/error.hpp"
#include "vrkg/pipeline.hpp"
#include "vrkg/train.hpp"

using namespace vrkg;

namespace {

InteractionSet interactions(std::size_t users, std::size_t items,
                            std::vector<std::pair<UserId, ItemId>> pairs) {
    InteractionSet s;
    s.user_count = users;
    s.item_count = items;
    s.pairs = std::move(pairs);
    std::sort(s.pairs.begin(), s.pairs.end());
    return s;
}

RunConfig toy_config(int epochs) {
    RunConfig c = load_run_config(testing::toy_dir() / "toy.conf");
    c.epochs = epochs;
    return c;
}

double max_abs(const Matrix& m) {
    double worst = 0.0;
    for (double v : m.flat()) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace

TEST_CASE("forced negative") {
    auto train = interactions(1, 2, {{0, 0}});
    auto test = interactions(1, 2, {});
    NegativeSampler s(train, test);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(s.draw(0, rng) == 1);
    auto full = interactions(1, 2, {{0, 0}, {0, 1}});
    NegativeSampler none(full, test);
    CHECK_THROWS_AS(none.draw(0, rng), Error);
}

TEST_CASE("negatives avoid train and test positives") {
    auto train = interactions(2, 10, {{0, 0}, {0, 3}, {1, 9}});
    auto test = interactions(2, 10, {{0, 5}, {1, 0}});
    NegativeSampler s(train, test);
    Rng rng(3);
    for (int i = 0; i < 5000; ++i) {
        ItemId j = s.draw(0, rng);
        CHECK((j != 0 && j != 3 && j != 5));
        ItemId k = s.draw(1, rng);
        CHECK((k != 9 && k != 0));
    }
}

TEST_CASE("batch sizing") {
    std::vector<std::pair<UserId, ItemId>> pairs;
    for (UserId u = 0; u < 700; ++u)
        for (ItemId i = 0; i < 49; ++i) pairs.emplace_back(u, i * 2 + (u % 2));
    pairs.resize(33876);
    auto train = interactions(700, 100, pairs);
    NegativeSampler s(train, interactions(700, 100, {}));
    Rng rng(9);
    auto batch = sample_batch(train, 1024, s, rng);
    CHECK(batch.size() == 1024);
    for (const auto& t : batch) {
        CHECK(s.is_positive(t.user, t.positive));
        CHECK(!s.is_positive(t.user, t.negative));
    }
}

TEST_CASE("negative draws are uniform over eligible items") {
    // 20 items, 5 positives: 15 eligible. Chi-square with 14 degrees of freedom
    // must stay within mean + 3 sd = 14 + 3 * sqrt(28).
    auto train = interactions(1, 20, {{0, 1}, {0, 4}, {0, 7}, {0, 8}, {0, 19}});
    NegativeSampler s(train, interactions(1, 20, {}));
    Rng rng(2024);
    const int draws = 100000;
    std::vector<int> counts(20, 0);
    for (int i = 0; i < draws; ++i) ++counts[s.draw(0, rng)];
    const double expected = draws / 15.0;
    double chi2 = 0.0;
    for (ItemId j = 0; j < 20; ++j) {
        if (s.is_positive(0, j)) {
            CHECK(counts[j] == 0);
            continue;
        }
        chi2 += (counts[j] - expected) * (counts[j] - expected) / expected;
    }
    CHECK(chi2 < 14.0 + 3.0 * std::sqrt(28.0));
}

TEST_CASE("bpr loss values") {
    std::vector<double> a{0.3}, b{0.3};
    CHECK(bpr_loss(a, b) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    std::vector<double> pos{1.0, 0.0}, neg{0.0, 0.5};
    CHECK(bpr_loss(pos, neg) == doctest::Approx(0.313262 + 0.974077).epsilon(1e-6));
    CHECK(bpr_loss(pos, neg) == doctest::Approx(std::log1p(std::exp(-1.0)) + std::log1p(std::exp(0.5))));
    CHECK(softplus(-800.0) == 0.0);
    CHECK(softplus(800.0) == 800.0);
    CHECK(softplus(-40.0) > 0.0);
    CHECK(softplus(50.0) == doctest::Approx(50.0).epsilon(1e-15));
    std::vector<double> p1{1.0}, n1{};
    CHECK_THROWS_AS(bpr_loss(p1, n1), Error);
}

TEST_CASE("gradient check on the toy model") {
    auto report = verify_gradients_on_toy_model();
    CHECK(report.failures == 0);
    CHECK(report.entries.size() >= 200);
    std::set<Block> seen;
    for (const auto& e : report.entries) seen.insert(e.block);
    CHECK(seen.size() == kAllBlocks.size());
}

TEST_CASE("gradient check under the entity-grounded registry") {
    auto toy = make_toy_problem(11);
    auto registry = trainable_blocks(ClusterStrategy::EntityGrounded);
    CHECK(std::find(registry.begin(), registry.end(), Block::Relation) == registry.end());
    auto report = gradient_check(toy.params, toy.view(), toy.batch, 1e-3, registry);
    CHECK(report.failures == 0);
}

TEST_CASE("saturated batch leaves only the l2 gradient") {
    auto toy = make_toy_problem(3);
    toy.config.layers = 0;
    const std::size_t d = toy.config.dim;
    BprTriple t{0, 0, 1};
    for (std::size_t c = 0; c < d; ++c) {
        toy.params.user_emb(0, c) = 10.0;
        toy.params.entity_emb(toy.item_entity[0], c) = 10.0;
        toy.params.entity_emb(toy.item_entity[1], c) = -10.0;
    }
    std::vector<BprTriple> batch{t};
    auto registry = trainable_blocks(ClusterStrategy::Static);
    GradientSet g;
    auto loss = backward(forward(toy.params, toy.view()), toy.params, toy.view(), batch, 1e-3, registry, g);
    CHECK(loss.bpr < 1e-300);
    for (Block b : registry)
        for (std::size_t i = 0; i < g.block(b).size(); ++i)
            CHECK(g.block(b).flat()[i] == doctest::Approx(2e-3 * toy.params.block(b).flat()[i]).epsilon(1e-12));
}

TEST_CASE("l2 part of the gradient is linear in lambda") {
    auto toy = make_toy_problem(4);
    auto registry = trainable_blocks(ClusterStrategy::Static);
    std::vector<BprTriple> empty;
    auto snap = forward(toy.params, toy.view());
    GradientSet g1, g2;
    auto l1 = backward(snap, toy.params, toy.view(), empty, 1e-4, registry, g1);
    auto l2 = backward(snap, toy.params, toy.view(), empty, 2e-4, registry, g2);
    CHECK(l1.bpr == 0.0);
    CHECK(l2.l2 == doctest::Approx(2 * l1.l2));
    for (Block b : registry)
        for (std::size_t i = 0; i < g1.block(b).size(); ++i)
            CHECK(g2.block(b).flat()[i] == doctest::Approx(2 * g1.block(b).flat()[i]));
}

TEST_CASE("non-finite gradients name the block") {
    auto toy = make_toy_problem(5);
    toy.params.centroids(0, 0) = std::numeric_limits<double>::infinity();
    auto registry = trainable_blocks(ClusterStrategy::Static);
    GradientSet g;
    try {
        backward(forward(toy.params, toy.view()), toy.params, toy.view(), toy.batch, 1e-5, registry, g);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Numeric);
        CHECK(std::string(e.what()).find("centroids") != std::string::npos);
    }
}

TEST_CASE("adam matches a hand trace on one scalar") {
    ParameterSet p;
    p.user_emb = Matrix(1, 1, 1.0);
    for (Block b : {Block::Entity, Block::Relation, Block::Centroid, Block::Fusion}) p.block(b) = Matrix(0, 0);
    auto state = make_adam_state(p);
    TrainConfig cfg;
    cfg.lr = 0.1;
    std::vector<Block> reg{Block::User};
    GradientSet g = zeros_like(p);

    g.user_emb(0, 0) = 0.5;
    adam_step(p, g, state, cfg, reg);
    // m = 0.05, v = 0.00025, m_hat = 0.5, v_hat = 0.25
    double theta = 1.0 - 0.1 * 0.5 / (0.5 + 1e-8);
    CHECK(p.user_emb(0, 0) == doctest::Approx(theta).epsilon(1e-15));

    g.user_emb(0, 0) = -1.0;
    adam_step(p, g, state, cfg, reg);
    double m = 0.9 * 0.05 - 0.1, v = 0.999 * 0.00025 + 0.001;
    double m_hat = m / (1 - 0.81), v_hat = v / (1 - 0.999 * 0.999);
    theta -= 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8);
    CHECK(p.user_emb(0, 0) == doctest::Approx(theta).epsilon(1e-14));
    CHECK(state.step == 2);
}

TEST_CASE("zero gradient leaves parameters unchanged") {
    auto toy = make_toy_problem(6);
    auto before = toy.params;
    auto state = make_adam_state(toy.params);
    auto registry = trainable_blocks(ClusterStrategy::Static);
    adam_step(toy.params, zeros_like(toy.params), state, TrainConfig{}, registry);
    CHECK(toy.params == before);
}

TEST_CASE("one optimizer step moves every block with a gradient") {
    auto toy = make_toy_problem(8);
    auto registry = trainable_blocks(ClusterStrategy::Static);
    GradientSet g;
    backward(forward(toy.params, toy.view()), toy.params, toy.view(), toy.batch, 1e-5, registry, g);
    auto before = toy.params;
    auto state = make_adam_state(toy.params);
    TrainConfig cfg;
    cfg.lr = 1e-3;
    adam_step(toy.params, g, state, cfg, registry);
    for (Block b : registry) {
        CAPTURE(block_name(b));
        if (max_abs(g.block(b)) > 0.0) CHECK(!(toy.params.block(b) == before.block(b)));
    }
    CHECK(toy.params.all_finite());
    double sum = 0.0;
    for (double a : softmax(toy.params.fusion_logits.flat())) sum += a;
    CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("ablation names and virtual counts") {
    CHECK(parse_ablation("k1") == Ablation::SingleRelation);
    CHECK(parse_ablation("per-relation") == Ablation::PerRelation);
    CHECK(parse_ablation("custom-K") == Ablation::CustomK);
    CHECK(to_string(Ablation::PerRelation) == "per-relation");
    CHECK_THROWS_AS(parse_ablation("k2"), Error);
    ModelConfig m;
    m.virtual_count = 5;
    CHECK(effective_virtual_count(m, Ablation::SingleRelation, 10) == 1);
    CHECK(effective_virtual_count(m, Ablation::PerRelation, 10) == 10);
    CHECK(effective_virtual_count(m, Ablation::CustomK, 10) == 5);
}

TEST_CASE("zero epochs return the initial state") {
    auto cfg = toy_config(0);
    auto ds = load_dataset(cfg);
    auto result = train(ds.data, ds.kg, model_config(cfg), train_config(cfg));
    auto init = initial_state(ds.data, ds.kg, model_config(cfg), train_config(cfg));
    CHECK(result.params == init.params);
    CHECK(result.assignment.assign == init.assignment.assign);
    REQUIRE(result.history.size() == 1);
    CHECK(result.history[0].epoch == 0);
}

TEST_CASE("training is deterministic and reduces the loss") {
    auto cfg = toy_config(25);
    auto ds = load_dataset(cfg);
    auto a = train(ds.data, ds.kg, model_config(cfg), train_config(cfg));
    auto b = train(ds.data, ds.kg, model_config(cfg), train_config(cfg));
    CHECK(a.params == b.params);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t e = 0; e < a.history.size(); ++e) {
        CHECK(a.history[e].loss == b.history[e].loss);
        CHECK(a.history[e].loss > 0.0);
        CHECK(std::isfinite(a.history[e].loss));
        CHECK(a.history[e].report.has_value() == b.history[e].report.has_value());
    }
    CHECK(a.history.back().loss < a.history.front().loss);
    CHECK(a.history[9].report.has_value());
    CHECK(!a.history[10].report.has_value());
    CHECK(a.final_report.rows[3].recall == b.final_report.rows[3].recall);
}

TEST_CASE("static strategy and patience") {
    auto cfg = toy_config(40);
    cfg.cluster_strategy = ClusterStrategy::Static;
    cfg.patience = 1;
    cfg.eval_every = 1;
    auto ds = load_dataset(cfg);
    auto r = train(ds.data, ds.kg, model_config(cfg), train_config(cfg));
    CHECK(r.history.size() <= 40u);
    CHECK(r.history.back().report.has_value());
    CHECK(r.params.all_finite());
}

TEST_CASE("invalid training settings") {
    auto cfg = toy_config(1);
    auto ds = load_dataset(cfg);
    auto t = train_config(cfg);
    t.batch_size = 0;
    CHECK_THROWS_AS(train(ds.data, ds.kg, model_config(cfg), t), Error);
    auto m = model_config(cfg);
    m.iterations = 0;
    CHECK_THROWS_AS(train(ds.data, ds.kg, m, train_config(cfg)), Error);
}
