#include <algorithm>
#include <functional>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "vrkg/error.hpp"
#include "vrkg/ingest.hpp"

using namespace vrkg;
using testing::ScratchDir;
using testing::write_text;

namespace {

InteractionSet synthetic(std::size_t n) {
    InteractionSet s;
    s.user_count = 1 + n / 50;
    s.item_count = 50;
    for (std::size_t i = 0; i < n; ++i)
        s.pairs.emplace_back(static_cast<UserId>(i / 50), static_cast<ItemId>(i % 50));
    return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Numeric;
}

}  // namespace

TEST_CASE("duplicates collapse and ids are dense") {
    ScratchDir dir("ingest");
    write_text(dir / "i.tsv", "10\t7\t4.5\n10\t7\t3\n12\t3\n");
    auto loaded = load_interactions(dir / "i.tsv");
    CHECK(loaded.interactions.pairs.size() == 2);
    CHECK(loaded.interactions.user_count == 2);
    CHECK(loaded.interactions.item_count == 2);
    CHECK(loaded.maps.user_raw == std::vector<RawId>{10, 12});
    CHECK(loaded.maps.item_raw == std::vector<RawId>{3, 7});
    // (10,7) -> (0,1), (12,3) -> (1,0)
    CHECK(loaded.interactions.pairs == std::vector<std::pair<UserId, ItemId>>{{0, 1}, {1, 0}});
}

TEST_CASE("malformed and empty input") {
    ScratchDir dir("ingest");
    write_text(dir / "bad.tsv", "1\t2\n3\tx\n");
    try {
        load_interactions(dir / "bad.tsv");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    write_text(dir / "empty.tsv", "");
    CHECK(kind_of([&] { load_interactions(dir / "empty.tsv"); }) == ErrorKind::Data);
    write_text(dir / "one.tsv", "5\n");
    CHECK(kind_of([&] { load_interactions(dir / "one.tsv"); }) == ErrorKind::Data);
    CHECK(kind_of([&] { load_interactions(dir / "missing.tsv"); }) == ErrorKind::Data);

    write_text(dir / "i.tsv", "1\t2\n");
    write_text(dir / "kg.tsv", "2\t0\t9\n2\t0\n");
    auto loaded = load_interactions(dir / "i.tsv");
    try {
        load_triples(dir / "kg.tsv", loaded.maps);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("triples align with items and gain inverse relations") {
    ScratchDir dir("ingest");
    write_text(dir / "i.tsv", "1\t100\n1\t200\n2\t200\n");
    write_text(dir / "kg.tsv", "200\t5\t900\n800\t3\t100\n");
    auto loaded = load_interactions(dir / "i.tsv");
    auto kg = load_triples(dir / "kg.tsv", loaded.maps);
    const auto& m = loaded.maps;
    CHECK(kg.triples().size() == 4);
    CHECK(kg.relation_count() == 4);
    CHECK(kg.entity_count() == 4);
    CHECK(m.item_entity == std::vector<EntityId>{0, 1});
    CHECK(m.relation_raw == std::vector<RawId>{3, 5});
    // head of the first triple is item 200 (dense item 1, entity 1)
    EntityId e900 = m.entity_index.at(900);
    auto n = neighbors(kg, m.item_entity[m.item_index.at(200)], m.relation_index.at(5));
    CHECK(std::vector<EntityId>(n.begin(), n.end()) == std::vector<EntityId>{e900});
    // a tail that is an item aligns too
    auto back = neighbors(kg, m.entity_index.at(800), m.relation_index.at(3));
    CHECK(std::vector<EntityId>(back.begin(), back.end()) == std::vector<EntityId>{0});

    write_text(dir / "single.tsv", "100\t1\t100\n");
    auto again = load_interactions(dir / "i.tsv");
    CHECK(load_triples(dir / "single.tsv", again.maps).triples().size() == 2);
}

TEST_CASE("id maps round trip") {
    auto loaded = load_interactions(testing::toy_dir() / "interactions.tsv");
    auto kg = load_triples(testing::toy_dir() / "kg.tsv", loaded.maps);
    const auto& m = loaded.maps;
    for (std::size_t u = 0; u < m.user_raw.size(); ++u) CHECK(m.user_index.at(m.user_raw[u]) == u);
    for (std::size_t i = 0; i < m.item_raw.size(); ++i) CHECK(m.item_index.at(m.item_raw[i]) == i);
    for (std::size_t e = 0; e < m.entity_raw.size(); ++e) CHECK(m.entity_index.at(m.entity_raw[e]) == e);
    for (std::size_t r = 0; r < m.relation_raw.size(); ++r) CHECK(m.relation_index.at(m.relation_raw[r]) == r);
    std::set<EntityId> aligned(m.item_entity.begin(), m.item_entity.end());
    CHECK(aligned.size() == m.item_entity.size());
    CHECK(kg.entity_count() == m.entity_raw.size());
    CHECK(loaded.interactions.pairs.size() == 280);
    CHECK(kg.triples().size() == 2 * 106);
}

TEST_CASE("split sizes") {
    auto ten = synthetic(10);
    auto s = split(ten, 1);
    CHECK(s.train.pairs.size() == 8);
    CHECK(s.test.pairs.size() == 2);
    auto big = split(synthetic(42346), 2023);
    CHECK(big.train.pairs.size() == 33876);
    CHECK(big.test.pairs.size() == 8470);
    CHECK_THROWS_AS(split(ten, 1, 1.0), Error);
    CHECK_THROWS_AS(split(ten, 1, 0.0), Error);
}

TEST_CASE("split is a deterministic partition") {
    auto all = synthetic(1000);
    for (bool per_user : {false, true}) {
        auto a = split(all, 99, 0.8, per_user);
        auto b = split(all, 99, 0.8, per_user);
        CHECK(a.train.pairs == b.train.pairs);
        CHECK(a.test.pairs == b.test.pairs);
        CHECK(std::is_sorted(a.train.pairs.begin(), a.train.pairs.end()));
        std::vector<std::pair<UserId, ItemId>> merged;
        std::merge(a.train.pairs.begin(), a.train.pairs.end(), a.test.pairs.begin(), a.test.pairs.end(),
                   std::back_inserter(merged));
        CHECK(merged == all.pairs);  // disjoint and exhaustive
        auto c = split(all, 100, 0.8, per_user);
        CHECK(c.train.pairs != a.train.pairs);
    }
}

TEST_CASE("per-user split keeps every user in train") {
    InteractionSet s;
    s.user_count = 30;
    s.item_count = 4;
    for (UserId u = 0; u < 30; ++u)
        for (ItemId i = 0; i <= u % 4; ++i) s.pairs.emplace_back(u, i);
    auto sp = split(s, 5, 0.5, true);
    CHECK(count_cold_users(sp) == 0);
    std::set<UserId> trained;
    for (auto [u, i] : sp.train.pairs) trained.insert(u);
    CHECK(trained.size() == 30);
}

TEST_CASE("fingerprint is stable") {
    ScratchDir dir("ingest");
    write_text(dir / "a", "");
    CHECK(file_fingerprint(dir / "a") == "cbf29ce484222325");  // FNV-1a offset basis
    write_text(dir / "b", "a");
    CHECK(file_fingerprint(dir / "b") == "af63dc4c8601ec8c");
}
