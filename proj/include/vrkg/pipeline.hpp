#pragma once

// End-to-end commands behind the CLI: ingest -> train -> write artifacts,
// checkpoint evaluation, and KG statistics export.

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "vrkg/checkpoint.hpp"
#include "vrkg/config.hpp"
#include "vrkg/eval.hpp"
#include "vrkg/ingest.hpp"
#include "vrkg/train.hpp"

namespace vrkg {

struct Dataset {
    IdMaps maps;
    InteractionSet interactions;
    KnowledgeGraph kg;  // inverse relations included
    TrainingData data;
    std::size_t canonical_triples = 0;
};

/// Loads both files and reproduces the seeded split. Throws Error(Data).
Dataset load_dataset(const RunConfig& config);

/// Files written by run_train into config.out.
struct RunArtifacts {
    std::filesystem::path checkpoint;
    std::filesystem::path train_log;
    std::filesystem::path report;
    std::filesystem::path manifest;
    std::filesystem::path exposure;
};

RunArtifacts artifact_paths(const std::filesystem::path& out_dir);

struct TrainRun {
    RunArtifacts artifacts;
    TrainResult result;
};

/// Validates, loads data, trains, then writes checkpoint.bin, train_log.csv,
/// report.csv, virtual_exposure.csv and manifest.txt. Nothing is written when
/// configuration or data loading fails.
TrainRun run_train(const RunConfig& config);

/// Rebuilds the split from `config`, loads the checkpoint and evaluates it.
/// Throws Error(Config) when the checkpoint does not match the data.
MetricsReport run_eval(const RunConfig& config, const std::filesystem::path& checkpoint,
                       std::span<const std::size_t> cutoffs);

/// Writes relation_histogram.csv (exposure_count,num_relations) and
/// relations.csv (relation_id,canonical_count,assigned_virtual_relation); with a
/// checkpoint also virtual_exposure.csv (virtual_relation,exposure_count).
void run_stats(const std::filesystem::path& kg_path, const std::optional<std::filesystem::path>& checkpoint,
               const std::filesystem::path& out_dir);

/// Applies --threads and --kernel.
void apply_runtime(const RunConfig& config);

std::vector<std::size_t> parse_cutoffs(const std::string& text);

void write_exposure_csv(const std::filesystem::path& path, std::span<const std::size_t> counts);

}  // namespace vrkg
