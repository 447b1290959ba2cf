#include "vrkg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string_view>

#include "vrkg/error.hpp"
#include "vrkg/rng.hpp"

namespace vrkg {

namespace {

std::string_view trim_right(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits on runs of tabs/spaces.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == '\t' || line[i] == ' ')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != '\t' && line[j] != ' ') ++j;
        if (j > i) fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

bool parse_int(std::string_view token, RawId& out) {
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    return in;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no, const std::string& why) {
    throw data_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
}

template <typename Dense>
void build_index(const std::set<RawId>& raw, std::vector<RawId>& dense_to_raw,
                 std::unordered_map<RawId, Dense>& raw_to_dense) {
    dense_to_raw.assign(raw.begin(), raw.end());
    raw_to_dense.clear();
    raw_to_dense.reserve(raw.size());
    for (std::size_t i = 0; i < dense_to_raw.size(); ++i) {
        raw_to_dense.emplace(dense_to_raw[i], static_cast<Dense>(i));
    }
}

}  // namespace

LoadedInteractions load_interactions(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<std::pair<RawId, RawId>> raw_pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim_right(line);
        if (view.empty()) continue;
        auto fields = split_fields(view);
        if (fields.size() < 2 || fields.size() > 3) {
            malformed(path, line_no, "expected 'user<TAB>item[<TAB>rating]'");
        }
        RawId user = 0;
        RawId item = 0;
        if (!parse_int(fields[0], user) || !parse_int(fields[1], item)) {
            malformed(path, line_no, "user and item must be integers");
        }
        raw_pairs.emplace_back(user, item);
    }
    if (raw_pairs.empty()) throw data_error("interaction file '" + path.string() + "' is empty");

    std::set<RawId> users;
    std::set<RawId> items;
    for (const auto& [u, i] : raw_pairs) {
        users.insert(u);
        items.insert(i);
    }

    LoadedInteractions out;
    IdMaps& maps = out.maps;
    build_index(users, maps.user_raw, maps.user_index);
    build_index(items, maps.item_raw, maps.item_index);
    build_index(items, maps.entity_raw, maps.entity_index);
    maps.item_entity.resize(maps.item_raw.size());
    for (std::size_t i = 0; i < maps.item_entity.size(); ++i) maps.item_entity[i] = static_cast<EntityId>(i);

    auto& pairs = out.interactions.pairs;
    pairs.reserve(raw_pairs.size());
    for (const auto& [u, i] : raw_pairs) pairs.emplace_back(maps.user_index.at(u), maps.item_index.at(i));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    out.interactions.user_count = maps.user_raw.size();
    out.interactions.item_count = maps.item_raw.size();
    return out;
}

KnowledgeGraph load_triples(const std::filesystem::path& path, IdMaps& maps) {
    std::ifstream in = open_input(path);
    struct RawTriple {
        RawId head, relation, tail;
    };
    std::vector<RawTriple> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim_right(line);
        if (view.empty()) continue;
        auto fields = split_fields(view);
        if (fields.size() != 3) malformed(path, line_no, "expected 'head<TAB>relation<TAB>tail'");
        RawTriple t{};
        if (!parse_int(fields[0], t.head) || !parse_int(fields[1], t.relation) ||
            !parse_int(fields[2], t.tail)) {
            malformed(path, line_no, "triple fields must be integers");
        }
        raw.push_back(t);
    }

    // Items keep entity ids [0, item_count); everything else is appended.
    std::set<RawId> extra_entities;
    std::set<RawId> relations;
    for (const RawTriple& t : raw) {
        for (RawId e : {t.head, t.tail}) {
            if (!maps.item_index.contains(e)) extra_entities.insert(e);
        }
        relations.insert(t.relation);
    }
    maps.entity_raw.assign(maps.item_raw.begin(), maps.item_raw.end());
    maps.entity_index.clear();
    for (std::size_t i = 0; i < maps.item_raw.size(); ++i) {
        maps.entity_index.emplace(maps.item_raw[i], maps.item_entity[i]);
    }
    for (RawId e : extra_entities) {
        maps.entity_index.emplace(e, static_cast<EntityId>(maps.entity_raw.size()));
        maps.entity_raw.push_back(e);
    }
    build_index(relations, maps.relation_raw, maps.relation_index);

    std::vector<Triple> triples;
    triples.reserve(raw.size());
    for (const RawTriple& t : raw) {
        triples.push_back({maps.entity_index.at(t.head), maps.relation_index.at(t.relation),
                           maps.entity_index.at(t.tail)});
    }
    KnowledgeGraph kg = build_kg(std::move(triples), maps.entity_raw.size(), maps.relation_raw.size());
    return add_inverse_relations(kg);
}

SplitDataset split(const InteractionSet& interactions, std::uint64_t seed, double ratio, bool per_user) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw config_error("split ratio must lie in (0, 1)");
    SplitDataset out;
    out.seed = seed;
    out.train.user_count = out.test.user_count = interactions.user_count;
    out.train.item_count = out.test.item_count = interactions.item_count;

    Rng rng(seed);
    const auto& pairs = interactions.pairs;
    if (!per_user) {
        std::vector<std::size_t> order(pairs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(std::span<std::size_t>(order));
        const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(pairs.size())));
        for (std::size_t k = 0; k < order.size(); ++k) {
            (k < n_train ? out.train : out.test).pairs.push_back(pairs[order[k]]);
        }
    } else {
        std::size_t begin = 0;
        while (begin < pairs.size()) {
            std::size_t end = begin;
            while (end < pairs.size() && pairs[end].first == pairs[begin].first) ++end;
            std::vector<std::pair<UserId, ItemId>> mine(pairs.begin() + begin, pairs.begin() + end);
            rng.shuffle(std::span<std::pair<UserId, ItemId>>(mine));
            auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(mine.size())));
            n_train = std::max<std::size_t>(n_train, 1);
            for (std::size_t k = 0; k < mine.size(); ++k) (k < n_train ? out.train : out.test).pairs.push_back(mine[k]);
            begin = end;
        }
    }
    std::sort(out.train.pairs.begin(), out.train.pairs.end());
    std::sort(out.test.pairs.begin(), out.test.pairs.end());
    return out;
}

std::size_t count_cold_users(const SplitDataset& split) {
    std::vector<char> in_train(split.train.user_count, 0);
    for (const auto& p : split.train.pairs) in_train[p.first] = 1;
    std::vector<char> seen(split.test.user_count, 0);
    std::size_t cold = 0;
    for (const auto& p : split.test.pairs) {
        if (!in_train[p.first] && !seen[p.first]) ++cold;
        seen[p.first] = 1;
    }
    return cold;
}

std::string file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace vrkg
