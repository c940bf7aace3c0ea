#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "sedigest/common.hpp"
#include "sedigest/vector_space.hpp"

namespace sedigest::cluster {

struct ClusterParams {
    int min_cluster_size = 15;
    int min_samples = 0;  // 0 = follow min_cluster_size
    // metric is fixed: euclidean

    int effective_min_samples() const {
        return min_samples > 0 ? min_samples : min_cluster_size;
    }
    void validate() const;  // throws UsageError
};

struct Edge {
    int a, b;  // a < b
    double weight;
};

// Condensed-tree record. Clusters are numbered from n_points up (root =
// n_points); child < n_points is a point leaving parent at lambda.
struct CondensedNode {
    int parent;
    int child;
    double lambda;
    int size;
};

struct Clustering {
    std::vector<int> labels;  // aligned with input; -1 = outlier
    std::vector<CondensedNode> condensed_tree;
    std::map<int, double> stabilities;
    std::vector<int> selected;  // cluster ids chosen by extraction, ascending

    int cluster_count() const;
    std::vector<int> cluster_sizes() const;
    int outlier_count() const;
};

// Distance from each point to its k-th nearest neighbour (self excluded).
std::vector<double> core_distances(const std::vector<Eigen::VectorXf>& points, int k);

// max(core[i], core[j], euclidean(i, j)) density-smoothed metric.
struct MutualReachability {
    const std::vector<Eigen::VectorXf>& points;
    const std::vector<double>& core;

    std::size_t size() const { return points.size(); }
    double distance(std::size_t i, std::size_t j) const;  // plain euclidean
    double operator()(std::size_t i, std::size_t j) const;
};

// Prim over the complete mutual-reachability graph. Weight ties resolve
// toward the smaller (a,b) pair, so equal-weight inputs are deterministic.
std::vector<Edge> minimum_spanning_tree(const MutualReachability& graph);

// Single-linkage dendrogram -> condensed tree at lambda = 1/weight (zero
// weights capped at kMaxLambda). Splits with a side below min_cluster_size
// shed those points; the surviving side keeps the parent's identity.
inline constexpr double kMaxLambda = 1e12;
std::vector<CondensedNode> condense(std::vector<Edge> edges, int n_points,
                                    int min_cluster_size);

// Excess-of-mass flat extraction. The root is only used when the tree offers
// no other cluster at all (e.g. all points identical), in which case every
// point lands in one cluster.
Clustering extract(const std::vector<CondensedNode>& tree, int n_points);

// Full pipeline over document vectors: zero embeddings are outliers up
// front; fewer than min_cluster_size usable points yields an all-outlier
// result with a warning instead of an error.
Clustering cluster_documents(const std::vector<vector_space::DocVector>& vectors,
                             const ClusterParams& params, WarningLog* warnings = nullptr);

nlohmann::json params_to_json(const ClusterParams& params);
ClusterParams params_from_json(const nlohmann::json& j);
nlohmann::json clustering_to_json(const Clustering& clustering, const ClusterParams& params);
Clustering clustering_from_json(const nlohmann::json& j);

}  // namespace sedigest::cluster
