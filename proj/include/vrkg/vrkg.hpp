#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vrkg/graph.hpp"
#include "vrkg/matrix.hpp"
#include "vrkg/params.hpp"

namespace vrkg {

/// How relation features are obtained before clustering.
///  - Static: the stored relation_feat rows are free vectors, clustered once.
///  - EntityGrounded: each relation's feature is the mean of (e_tail - e_head)
///    over its triples, recomputed from the current entity embeddings.
enum class ClusterStrategy { Static, EntityGrounded };

ClusterStrategy parse_cluster_strategy(std::string_view name);
std::string_view to_string(ClusterStrategy s);

struct RelationAssignment {
    std::vector<std::uint32_t> assign;  // relation -> virtual relation
    Matrix similarity;                  // |R| x K inner products (empty for identity assignments)
    std::size_t virtual_count = 0;
};

/// The knowledge graph split into one adjacency per virtual relation.
struct VrkgPartition {
    std::vector<Csr> subgraphs;  // head -> tails, per virtual relation
    std::vector<Csr> incoming;   // tail -> edge positions in the matching subgraph
    RelationAssignment assignment;

    std::size_t virtual_count() const noexcept { return subgraphs.size(); }
};

Matrix relation_features(const KnowledgeGraph& kg, const ParameterSet& params, ClusterStrategy strategy);

/// similarity = features * centroids^T; argmax per row, lowest index on ties.
RelationAssignment assign_relations(const Matrix& features, const Matrix& centroids);

/// Each centroid becomes the unit-length direction of the mean of its assigned
/// features. Empty clusters (and clusters whose mean is zero) keep the previous row.
Matrix update_centroids(const Matrix& features, const RelationAssignment& assignment,
                        const Matrix& previous);

/// Sum over relations of the similarity to the assigned centroid.
double assignment_objective(const Matrix& features, const Matrix& centroids,
                            const RelationAssignment& assignment);

struct ClusteringRun {
    RelationAssignment assignment;  // from the last assign step
    std::vector<double> objectives; // objective after each assign step
};

/// `rounds` alternations of assign + update. `centroids` is scaled to unit rows
/// first and updated in place; the recorded objective never decreases.
ClusteringRun alternate_clustering(const Matrix& features, Matrix& centroids, int rounds);

/// Relation p maps to virtual relation p.
RelationAssignment identity_assignment(std::size_t relation_count);

VrkgPartition partition_graph(const KnowledgeGraph& kg, const RelationAssignment& assignment);

/// Triple count per virtual relation.
std::vector<std::size_t> exposure_counts(const VrkgPartition& partition);

}  // namespace vrkg
