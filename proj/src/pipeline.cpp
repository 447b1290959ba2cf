#include "vrkg/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vrkg/error.hpp"
#include "vrkg/simd/kernels.hpp"

namespace vrkg {

namespace fs = std::filesystem;

void apply_runtime(const RunConfig& config) {
    if (config.threads > 0) omp_set_num_threads(config.threads);
    simd::select(config.kernel);
}

Dataset load_dataset(const RunConfig& config) {
    if (config.interactions.empty() || config.kg.empty()) {
        throw config_error("both 'interactions' and 'kg' paths are required");
    }
    for (const fs::path& p : {config.interactions, config.kg}) {
        if (!fs::is_regular_file(p)) throw data_error("data file '" + p.string() + "' does not exist");
    }
    Dataset ds;
    LoadedInteractions loaded = load_interactions(config.interactions);
    ds.maps = std::move(loaded.maps);
    ds.interactions = std::move(loaded.interactions);
    ds.kg = load_triples(config.kg, ds.maps);
    ds.canonical_triples = ds.kg.triples().size() / 2;
    SplitDataset split_set = split(ds.interactions, config.seed, config.split_ratio, config.per_user_split);
    ds.data = make_training_data(std::move(split_set), ds.maps.item_entity);
    return ds;
}

RunArtifacts artifact_paths(const fs::path& out_dir) {
    return {out_dir / "checkpoint.bin", out_dir / "train_log.csv", out_dir / "report.csv",
            out_dir / "manifest.txt", out_dir / "virtual_exposure.csv"};
}

namespace {

std::string metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string join(std::span<const std::size_t> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
    return out;
}

}  // namespace

void write_exposure_csv(const fs::path& path, std::span<const std::size_t> counts) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    out << "virtual_relation,exposure_count\n";
    for (std::size_t k = 0; k < counts.size(); ++k) out << k << ',' << counts[k] << '\n';
}

TrainRun run_train(const RunConfig& input) {
    validate(input);
    RunConfig config = input;
    config.interactions = fs::absolute(config.interactions);
    config.kg = fs::absolute(config.kg);
    apply_runtime(config);
    const Dataset ds = load_dataset(config);

    fs::create_directories(config.out);
    TrainRun run;
    run.artifacts = artifact_paths(config.out);
    const fs::path partial_log = run.artifacts.train_log.string() + ".partial";
    std::ofstream log(partial_log, std::ios::trunc);
    if (!log) throw data_error("cannot write '" + partial_log.string() + "'");
    log << "epoch,loss,recall@20,ndcg@20,hr@20,precision@20\n";
    auto on_epoch = [&](const EpochLog& e) {
        log << e.epoch << ',' << metric(e.loss);
        if (e.report) {
            const MetricRow& r = e.report->at(20);
            log << ',' << metric(r.recall) << ',' << metric(r.ndcg) << ',' << metric(r.hr) << ',' << metric(r.precision);
            log_info("epoch " + std::to_string(e.epoch) + " loss " + metric(e.loss) + " recall@20 " + metric(r.recall) +
                     " ndcg@20 " + metric(r.ndcg));
        } else {
            log << ",,,,";
        }
        log << '\n';
        log.flush();
    };

    run.result = train(ds.data, ds.kg, model_config(config), train_config(config), on_epoch);
    log.close();
    fs::rename(partial_log, run.artifacts.train_log);

    const TrainResult& res = run.result;
    Checkpoint ckpt{res.params, {}, static_cast<std::uint64_t>(res.model.iterations),
                    static_cast<std::uint64_t>(res.model.layers)};
    for (std::uint32_t a : res.assignment.assign) ckpt.assignment.push_back(static_cast<std::int32_t>(a));
    save_checkpoint(run.artifacts.checkpoint, ckpt);
    write_report_csv(run.artifacts.report, res.final_report);
    const auto exposure = exposure_counts(partition_graph(ds.kg, res.assignment));
    write_exposure_csv(run.artifacts.exposure, exposure);

    KeyValues manifest{{"format", "vrkg-manifest-1"}};
    for (auto& kv : to_key_values(config)) manifest.push_back(std::move(kv));
    const auto& split = ds.data.split;
    manifest.insert(manifest.end(), {
        {"interactions_fnv1a64", file_fingerprint(config.interactions)},
        {"kg_fnv1a64", file_fingerprint(config.kg)},
        {"kernel_used", std::string(simd::active().name)},
        {"users", std::to_string(ds.interactions.user_count)},
        {"items", std::to_string(ds.interactions.item_count)},
        {"interactions_count", std::to_string(ds.interactions.pairs.size())},
        {"entities", std::to_string(ds.kg.entity_count())},
        {"relations", std::to_string(ds.kg.relation_count())},
        {"canonical_triples", std::to_string(ds.canonical_triples)},
        {"triples", std::to_string(ds.kg.triples().size())},
        {"train_pairs", std::to_string(split.train.pairs.size())},
        {"test_pairs", std::to_string(split.test.pairs.size())},
        {"cold_users", std::to_string(res.final_report.cold_users)},
        {"virtual_relations", std::to_string(res.model.virtual_count)},
        {"virtual_exposure", join(exposure)},
        {"epochs_run", std::to_string(res.history.back().epoch)},
        {"final_recall@20", metric(res.final_report.at(20).recall)},
        {"final_ndcg@20", metric(res.final_report.at(20).ndcg)},
    });
    write_key_values(run.artifacts.manifest, manifest);
    return run;
}

MetricsReport run_eval(const RunConfig& input, const fs::path& checkpoint_path,
                       std::span<const std::size_t> cutoffs) {
    validate(input);
    apply_runtime(input);
    if (cutoffs.empty() || std::find(cutoffs.begin(), cutoffs.end(), 0) != cutoffs.end()) {
        throw config_error("cutoffs must be positive");
    }
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const Dataset ds = load_dataset(input);
    const ParameterSet& p = ckpt.params;
    if (p.user_emb.rows() != ds.interactions.user_count || p.entity_emb.rows() != ds.kg.entity_count() ||
        p.relation_feat.rows() != ds.kg.relation_count()) {
        throw config_error("checkpoint shape (users " + std::to_string(p.user_emb.rows()) + ", entities " +
                           std::to_string(p.entity_emb.rows()) + ", relations " +
                           std::to_string(p.relation_feat.rows()) + ") does not match the data");
    }
    RelationAssignment assignment;
    assignment.virtual_count = p.virtual_count();
    for (std::int32_t a : ckpt.assignment) assignment.assign.push_back(static_cast<std::uint32_t>(a));
    const VrkgPartition partition = partition_graph(ds.kg, assignment);
    const UserGraph users = make_user_graph(ds.data.train_graph, ds.data.item_entity, ds.kg.entity_count());
    const ModelConfig model{.layers = static_cast<int>(ckpt.layers), .iterations = static_cast<int>(ckpt.iterations),
                            .virtual_count = p.virtual_count(), .dim = p.dim()};
    const ModelView view{partition, users, ds.data.item_entity, model};
    return evaluate(final_representations(forward(p, view)), ds.data.item_entity, ds.data.split, cutoffs);
}

void run_stats(const fs::path& kg_path, const std::optional<fs::path>& checkpoint, const fs::path& out_dir) {
    if (!fs::is_regular_file(kg_path)) throw data_error("data file '" + kg_path.string() + "' does not exist");
    IdMaps maps;
    const KnowledgeGraph kg = load_triples(kg_path, maps);
    std::optional<Checkpoint> ckpt;
    if (checkpoint) {
        ckpt = load_checkpoint(*checkpoint);
        if (ckpt->assignment.size() != kg.relation_count()) {
            throw config_error("checkpoint has " + std::to_string(ckpt->assignment.size()) +
                               " relations but the graph has " + std::to_string(kg.relation_count()));
        }
    }
    fs::create_directories(out_dir);

    const auto counts = kg.relation_counts();
    std::map<std::size_t, std::size_t, std::greater<>> histogram;
    for (std::size_t r = 0; r < kg.canonical_relation_count(); ++r) ++histogram[counts[r]];
    {
        std::ofstream out(out_dir / "relation_histogram.csv", std::ios::trunc);
        out << "exposure_count,num_relations\n";
        for (const auto& [count, n] : histogram) out << count << ',' << n << '\n';
    }
    {
        std::ofstream out(out_dir / "relations.csv", std::ios::trunc);
        out << "relation_id,canonical_count,assigned_virtual_relation\n";
        for (std::size_t r = 0; r < kg.relation_count(); ++r) {
            out << r << ',' << counts[r] << ',';
            if (ckpt) out << ckpt->assignment[r];
            out << '\n';
        }
    }
    if (ckpt) {
        RelationAssignment assignment;
        assignment.virtual_count = ckpt->params.virtual_count();
        for (std::int32_t a : ckpt->assignment) assignment.assign.push_back(static_cast<std::uint32_t>(a));
        write_exposure_csv(out_dir / "virtual_exposure.csv", exposure_counts(partition_graph(kg, assignment)));
    }
}

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(token, &used);
            if (used != token.size() || v <= 0) throw std::invalid_argument(token);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw config_error("invalid cutoff list '" + text + "'");
        }
    }
    if (out.empty()) throw config_error("empty cutoff list");
    return out;
}

}  // namespace vrkg
