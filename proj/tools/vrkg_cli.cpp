// vrkg: train, evaluate and inspect virtual-relation knowledge-graph recommenders.
//
//   vrkg train --config run.conf [--seed N] [--out DIR] [--ablation k1] ...
//   vrkg eval  --config DIR/manifest.txt --checkpoint DIR/checkpoint.bin [--cutoffs 1,5,10,20]
//   vrkg stats --kg kg.tsv [--checkpoint ckpt.bin] --out DIR
//
// Exit codes: 0 ok, 1 configuration, 2 data, 3 numeric.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "vrkg/error.hpp"
#include "vrkg/pipeline.hpp"

namespace {

using vrkg::KeyValues;

// Flags map 1:1 onto config keys and override the config file in command-line order.
void add_config_flags(CLI::App* cmd, KeyValues& overrides, bool training) {
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
            name, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
    };
    flag("--interactions", "interactions", "interaction file (user<TAB>item[<TAB>rating])");
    flag("--kg", "kg", "triple file (head<TAB>relation<TAB>tail)");
    flag("--seed", "seed", "split / initialization seed");
    flag("--threads", "threads", "worker threads (0 = all)");
    flag("--kernel", "kernel", "SIMD kernels: auto|scalar|avx2|neon");
    flag("--split-ratio", "split_ratio", "training fraction of interactions");
    if (!training) return;
    flag("--out", "out", "output directory");
    flag("--ablation", "ablation", "none|k1|per-relation|custom-K");
    flag("--k", "k", "number of virtual relations");
    flag("--layers", "layers", "propagation layers L");
    flag("--iterations", "iterations", "smoothing iterations Q");
    flag("--cluster-strategy", "cluster_strategy", "entity-grounded|static");
    flag("--dim", "dim", "embedding size d");
    flag("--epochs", "epochs", "training epochs");
    flag("--lr", "lr", "Adam learning rate");
    flag("--l2", "l2", "L2 penalty");
    flag("--batch-size", "batch_size", "BPR batch size");
    flag("--eval-every", "eval_every", "evaluate every N epochs");
    flag("--recluster-every", "recluster_every", "re-cluster relations every N epochs (0 = never)");
    flag("--patience", "patience", "early-stop after N evaluations without recall@20 gain (0 = off)");
    cmd->add_flag_callback("--verified", [&overrides] { overrides.emplace_back("verified", "true"); },
                           "run the finite-difference gradient gate first");
}

vrkg::RunConfig resolve_config(const std::string& config_path, const KeyValues& overrides, bool from_manifest) {
    vrkg::RunConfig config;
    if (!config_path.empty()) config = vrkg::load_run_config(config_path, from_manifest);
    for (const auto& [k, v] : overrides) vrkg::apply_setting(config, k, v);
    return config;
}

void print_report(const vrkg::MetricsReport& report) {
    std::printf("cutoff,recall,ndcg,hr,precision,users_evaluated\n");
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
        const auto& r = report.rows[c];
        std::printf("%zu,%.6f,%.6f,%.6f,%.6f,%zu\n", report.cutoffs[c], r.recall, r.ndcg, r.hr, r.precision,
                    report.users_evaluated);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph recommender with virtual relations and local weighted smoothing"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "suppress progress messages");

    std::string config_path;
    KeyValues overrides;

    auto* train_cmd = app.add_subcommand("train", "ingest, train and write checkpoint / logs / manifest");
    train_cmd->add_option("--config", config_path, "key = value config file");
    add_config_flags(train_cmd, overrides, true);

    std::string checkpoint_path;
    std::string cutoffs_text = "1,5,10,20";
    std::string report_path;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the reproduced test split");
    eval_cmd->add_option("--config,--manifest", config_path, "config or manifest.txt of the training run")->required();
    eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    eval_cmd->add_option("--cutoffs", cutoffs_text, "comma-separated list lengths");
    eval_cmd->add_option("--out", report_path, "report CSV path (default: stdout only)");
    add_config_flags(eval_cmd, overrides, false);

    std::string kg_path;
    std::string stats_out = "stats";
    auto* stats_cmd = app.add_subcommand("stats", "relation frequency and virtual-relation exposure CSVs");
    stats_cmd->add_option("--kg", kg_path, "triple file")->required();
    stats_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint for virtual-relation exposure");
    stats_cmd->add_option("--out", stats_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(vrkg::ErrorKind::Config);
    }
    vrkg::set_quiet(quiet);

    try {
        if (*train_cmd) {
            const auto config = resolve_config(config_path, overrides, false);
            const auto run = vrkg::run_train(config);
            print_report(run.result.final_report);
            std::cerr << "wrote " << run.artifacts.checkpoint.string() << ", " << run.artifacts.train_log.string()
                      << ", " << run.artifacts.report.string() << ", " << run.artifacts.manifest.string() << '\n';
        } else if (*eval_cmd) {
            const auto config = resolve_config(config_path, overrides, true);
            const auto cutoffs = vrkg::parse_cutoffs(cutoffs_text);
            const auto report = vrkg::run_eval(config, checkpoint_path, cutoffs);
            print_report(report);
            if (!report_path.empty()) vrkg::write_report_csv(report_path, report);
        } else if (*stats_cmd) {
            std::optional<std::filesystem::path> ckpt;
            if (!checkpoint_path.empty()) ckpt = checkpoint_path;
            vrkg::run_stats(kg_path, ckpt, stats_out);
        }
    } catch (const vrkg::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(vrkg::ErrorKind::Data);
    }
    return 0;
}
