#include "vrkg/vrkg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vrkg/error.hpp"
#include "vrkg/simd/kernels.hpp"

namespace vrkg {

ClusterStrategy parse_cluster_strategy(std::string_view name) {
    if (name == "static") return ClusterStrategy::Static;
    if (name == "entity-grounded") return ClusterStrategy::EntityGrounded;
    throw config_error("unknown cluster strategy '" + std::string(name) +
                       "' (expected static|entity-grounded)");
}

std::string_view to_string(ClusterStrategy s) {
    return s == ClusterStrategy::Static ? "static" : "entity-grounded";
}

Matrix relation_features(const KnowledgeGraph& kg, const ParameterSet& params, ClusterStrategy strategy) {
    Matrix features = params.relation_feat;
    if (strategy == ClusterStrategy::Static) return features;

    const std::size_t d = params.dim();
    Matrix sums(kg.relation_count(), d);
    std::vector<std::size_t> counts(kg.relation_count(), 0);
    for (const Triple& t : kg.triples()) {
        auto row = sums.row(t.relation);
        simd::axpy(1.0, params.entity_emb.row(t.tail), row);
        simd::axpy(-1.0, params.entity_emb.row(t.head), row);
        ++counts[t.relation];
    }
    for (std::size_t r = 0; r < kg.relation_count(); ++r) {
        if (counts[r] == 0) continue;
        auto out = features.row(r);
        auto in = sums.row(r);
        for (std::size_t c = 0; c < d; ++c) out[c] = in[c] / static_cast<double>(counts[r]);
    }
    return features;
}

RelationAssignment assign_relations(const Matrix& features, const Matrix& centroids) {
    const std::size_t k_count = centroids.rows();
    RelationAssignment out;
    out.virtual_count = k_count;
    out.similarity = Matrix(features.rows(), k_count);
    out.assign.assign(features.rows(), 0);
    double max_centroid_norm = 0.0;
    for (std::size_t k = 0; k < k_count; ++k)
        max_centroid_norm = std::max(max_centroid_norm, std::sqrt(simd::dot(centroids.row(k), centroids.row(k))));
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t p = 0; p < features.rows(); ++p) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < k_count; ++k) {
            const double s = simd::dot(features.row(p), centroids.row(k));
            out.similarity(p, k) = s;
            top = std::max(top, s);
        }
        // Similarities closer than the dot-product rounding bound are ties and go to the lowest index,
        // so the choice does not depend on how the inputs happen to round.
        const double f_norm = std::sqrt(simd::dot(features.row(p), features.row(p)));
        const double tol = 4.0 * static_cast<double>(features.cols() + 1) * eps * f_norm * max_centroid_norm;
        std::uint32_t best = 0;
        while (best + 1 < k_count && out.similarity(p, best) < top - tol) ++best;
        out.assign[p] = best;
    }
    return out;
}

Matrix update_centroids(const Matrix& features, const RelationAssignment& assignment, const Matrix& previous) {
    Matrix sums(previous.rows(), previous.cols());
    std::vector<std::size_t> counts(previous.rows(), 0);
    for (std::size_t p = 0; p < features.rows(); ++p) {
        simd::axpy(1.0, features.row(p), sums.row(assignment.assign[p]));
        ++counts[assignment.assign[p]];
    }
    Matrix out = previous;
    for (std::size_t k = 0; k < previous.rows(); ++k) {
        auto row = sums.row(k);
        const double norm = std::sqrt(simd::dot(row, row));
        if (counts[k] == 0 || norm == 0.0) {
            log_warning("virtual relation " + std::to_string(k) + " has no usable members; keeping its centroid");
            continue;
        }
        auto dst = out.row(k);
        for (std::size_t c = 0; c < row.size(); ++c) dst[c] = row[c] / norm;
    }
    return out;
}

double assignment_objective(const Matrix& features, const Matrix& centroids,
                            const RelationAssignment& assignment) {
    double total = 0.0;
    for (std::size_t p = 0; p < features.rows(); ++p) {
        total += simd::dot(features.row(p), centroids.row(assignment.assign[p]));
    }
    return total;
}

ClusteringRun alternate_clustering(const Matrix& features, Matrix& centroids, int rounds) {
    ClusteringRun run;
    // Objective is only monotone over unit-length centroids.
    for (std::size_t k = 0; k < centroids.rows(); ++k) {
        auto row = centroids.row(k);
        const double norm = std::sqrt(simd::dot(row, row));
        if (norm > 0.0) simd::scale(1.0 / norm, row);
    }
    for (int r = 0; r < rounds; ++r) {
        run.assignment = assign_relations(features, centroids);
        run.objectives.push_back(assignment_objective(features, centroids, run.assignment));
        centroids = update_centroids(features, run.assignment, centroids);
    }
    return run;
}

RelationAssignment identity_assignment(std::size_t relation_count) {
    RelationAssignment out;
    out.virtual_count = relation_count;
    out.assign.resize(relation_count);
    for (std::size_t p = 0; p < relation_count; ++p) out.assign[p] = static_cast<std::uint32_t>(p);
    return out;
}

VrkgPartition partition_graph(const KnowledgeGraph& kg, const RelationAssignment& assignment) {
    if (assignment.assign.size() != kg.relation_count()) {
        throw config_error("assignment covers " + std::to_string(assignment.assign.size()) +
                           " relations but the graph has " + std::to_string(kg.relation_count()));
    }
    const std::size_t k_count = assignment.virtual_count;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edges(k_count);
    for (const Triple& t : kg.triples()) {
        const std::uint32_t k = assignment.assign[t.relation];
        if (k >= k_count) throw config_error("relation assigned to a nonexistent virtual relation");
        edges[k].emplace_back(t.head, t.tail);
    }
    VrkgPartition out;
    out.assignment = assignment;
    std::size_t covered = 0;
    for (std::size_t k = 0; k < k_count; ++k) {
        out.subgraphs.push_back(build_csr(kg.entity_count(), std::move(edges[k])));
        out.incoming.push_back(incoming_edge_index(out.subgraphs.back(), kg.entity_count()));
        covered += out.subgraphs.back().edge_count();
    }
    if (covered != kg.triples().size()) throw data_error("virtual subgraphs do not cover the graph exactly");
    return out;
}

std::vector<std::size_t> exposure_counts(const VrkgPartition& partition) {
    std::vector<std::size_t> counts;
    for (const Csr& g : partition.subgraphs) counts.push_back(g.edge_count());
    return counts;
}

}  // namespace vrkg
