#include "vrkg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include "vrkg/error.hpp"

namespace vrkg {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw config_error("invalid value '" + value + "' for '" + key + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw config_error("invalid boolean '" + value + "' for '" + key + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["interactions"] = [](RunConfig& c, const std::string&, const std::string& v) { c.interactions = v; };
        t["kg"] = [](RunConfig& c, const std::string&, const std::string& v) { c.kg = v; };
        t["out"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; };
        t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); };
        t["threads"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.threads = parse_number<int>(k, v); };
        t["kernel"] = [](RunConfig& c, const std::string&, const std::string& v) { c.kernel = v; };
        t["dim"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dim = parse_number<std::size_t>(k, v); };
        t["k"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.k = parse_number<std::size_t>(k, v); };
        t["layers"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.layers = parse_number<int>(k, v); };
        t["iterations"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.iterations = parse_number<int>(k, v); };
        t["lr"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.lr = parse_number<double>(k, v); };
        t["l2"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.l2 = parse_number<double>(k, v); };
        t["batch_size"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.batch_size = parse_number<std::size_t>(k, v); };
        t["epochs"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.epochs = parse_number<int>(k, v); };
        t["eval_every"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.eval_every = parse_number<int>(k, v); };
        t["recluster_every"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.recluster_every = parse_number<int>(k, v); };
        t["init_rounds"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.init_rounds = parse_number<int>(k, v); };
        t["patience"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.patience = parse_number<int>(k, v); };
        t["verified"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.verified = parse_bool(k, v); };
        t["cluster_strategy"] = [](RunConfig& c, const std::string&, const std::string& v) { c.cluster_strategy = parse_cluster_strategy(v); };
        t["ablation"] = [](RunConfig& c, const std::string&, const std::string& v) { c.ablation = parse_ablation(v); };
        t["split_ratio"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.split_ratio = parse_number<double>(k, v); };
        t["per_user_split"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.per_user_split = parse_bool(k, v); };
        return t;
    }();
    return table;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config '" + path.string() + "'");
    KeyValues out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw config_error(path.string() + ":" + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
    }
    return out;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& values) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    for (const auto& [k, v] : values) out << k << " = " << v << '\n';
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value, bool ignore_unknown) {
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) {
        if (ignore_unknown) return;
        throw config_error("unknown config key '" + key + "'");
    }
    it->second(config, key, value);
}

RunConfig load_run_config(const std::filesystem::path& path, bool ignore_unknown) {
    RunConfig config;
    for (const auto& [k, v] : read_key_values(path)) apply_setting(config, k, v, ignore_unknown);
    // Relative data paths are resolved against the config file's directory.
    const auto base = path.parent_path();
    for (auto* p : {&config.interactions, &config.kg}) {
        if (!p->empty() && p->is_relative()) *p = base / *p;
    }
    return config;
}

void validate(const RunConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw config_error(what);
    };
    require(c.dim >= 1, "dim must be >= 1");
    require(c.k >= 1, "k must be >= 1");
    require(c.layers >= 0, "layers must be >= 0");
    require(c.iterations >= 1, "iterations must be >= 1");
    require(c.lr > 0.0, "lr must be > 0");
    require(c.l2 >= 0.0, "l2 must be >= 0");
    require(c.batch_size >= 1, "batch_size must be >= 1");
    require(c.epochs >= 0, "epochs must be >= 0");
    require(c.eval_every >= 1, "eval_every must be >= 1");
    require(c.recluster_every >= 0, "recluster_every must be >= 0");
    require(c.init_rounds >= 1, "init_rounds must be >= 1");
    require(c.patience >= 0, "patience must be >= 0");
    require(c.threads >= 0, "threads must be >= 0");
    require(c.split_ratio > 0.0 && c.split_ratio < 1.0, "split_ratio must lie in (0, 1)");
    require(c.kernel == "auto" || c.kernel == "scalar" || c.kernel == "avx2" || c.kernel == "neon",
            "kernel must be auto|scalar|avx2|neon");
}

KeyValues to_key_values(const RunConfig& c) {
    return {
        {"interactions", c.interactions.string()},
        {"kg", c.kg.string()},
        {"out", c.out.string()},
        {"seed", std::to_string(c.seed)},
        {"threads", std::to_string(c.threads)},
        {"kernel", c.kernel},
        {"dim", std::to_string(c.dim)},
        {"k", std::to_string(c.k)},
        {"layers", std::to_string(c.layers)},
        {"iterations", std::to_string(c.iterations)},
        {"lr", format_double(c.lr)},
        {"l2", format_double(c.l2)},
        {"batch_size", std::to_string(c.batch_size)},
        {"epochs", std::to_string(c.epochs)},
        {"eval_every", std::to_string(c.eval_every)},
        {"recluster_every", std::to_string(c.recluster_every)},
        {"init_rounds", std::to_string(c.init_rounds)},
        {"patience", std::to_string(c.patience)},
        {"verified", c.verified ? "true" : "false"},
        {"cluster_strategy", std::string(to_string(c.cluster_strategy))},
        {"ablation", std::string(to_string(c.ablation))},
        {"split_ratio", format_double(c.split_ratio)},
        {"per_user_split", c.per_user_split ? "true" : "false"},
    };
}

ModelConfig model_config(const RunConfig& c) {
    return ModelConfig{.layers = c.layers, .iterations = c.iterations, .virtual_count = c.k, .dim = c.dim};
}

TrainConfig train_config(const RunConfig& c) {
    TrainConfig t;
    t.lr = c.lr;
    t.l2 = c.l2;
    t.batch_size = c.batch_size;
    t.epochs = c.epochs;
    t.eval_every = c.eval_every;
    t.recluster_every = c.recluster_every;
    t.init_rounds = c.init_rounds;
    t.patience = c.patience;
    t.seed = c.seed;
    t.strategy = c.cluster_strategy;
    t.ablation = c.ablation;
    t.verified = c.verified;
    return t;
}

}  // namespace vrkg
