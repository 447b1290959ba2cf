#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vrkg/model.hpp"
#include "vrkg/train.hpp"

namespace vrkg {

/// Everything a run needs. Config files are plain `key = value` lines; `#`
/// starts a comment. Keys match the field names below.
struct RunConfig {
    std::filesystem::path interactions;
    std::filesystem::path kg;
    std::filesystem::path out = "run";
    std::uint64_t seed = 2023;
    int threads = 0;  // 0 = all hardware threads
    std::string kernel = "auto";

    // model
    std::size_t dim = 64;
    std::size_t k = 3;
    int layers = 2;
    int iterations = 3;

    // training
    double lr = 1e-4;
    double l2 = 1e-5;
    std::size_t batch_size = 1024;
    int epochs = 1000;
    int eval_every = 10;
    int recluster_every = 10;
    int init_rounds = 10;
    int patience = 0;
    bool verified = false;
    ClusterStrategy cluster_strategy = ClusterStrategy::EntityGrounded;
    Ablation ablation = Ablation::None;

    // data
    double split_ratio = 0.8;
    bool per_user_split = false;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` text. Throws Error(Config) with the line number on malformed lines.
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& values);

/// Applies one setting; throws Error(Config) for unknown keys or bad values.
/// Keys that are not configuration (manifest statistics) are ignored when
/// `ignore_unknown` is set.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   bool ignore_unknown = false);

RunConfig load_run_config(const std::filesystem::path& path, bool ignore_unknown = false);

/// Range checks shared by every command.
void validate(const RunConfig& config);

KeyValues to_key_values(const RunConfig& config);
ModelConfig model_config(const RunConfig& config);
TrainConfig train_config(const RunConfig& config);

std::string format_double(double v);

}  // namespace vrkg
