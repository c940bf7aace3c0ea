#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "sedigest/cluster.hpp"
#include "sedigest/prep.hpp"
#include "sedigest/vector_space.hpp"

namespace sedigest::topic_model {

struct Topic {
    int topic_id = 0;  // 1-based rank by descending count
    int count = 0;
    std::string name;  // first 4 representation terms joined by '_'
    std::vector<std::string> representation;  // top terms, best first (10 when available)
    std::vector<std::int64_t> member_ids;
    Eigen::VectorXf centroid;  // mean of member full vectors
    std::optional<std::array<double, 2>> map_xy;
};

// Class-based tf-idf: score(t,c) = tf(t,c) * ln(1 + A/f(t)) with A = mean
// token count per class and f(t) = occurrences of t across all classes.
// Only terms present in a class appear in its map (their scores are > 0).
std::map<int, std::map<std::string, double>> ctfidf(
    const std::map<int, std::vector<const prep::CleanDocument*>>& classes,
    WarningLog* warnings = nullptr);

// Topics from a clustering; docs and vectors are aligned with the labels.
std::vector<Topic> build_topics(const cluster::Clustering& clustering,
                                const std::vector<prep::CleanDocument>& docs,
                                const std::vector<vector_space::DocVector>& vectors,
                                WarningLog* warnings = nullptr);

struct TopicReport {
    struct Row {
        int topic_id;
        int count;
        std::string name;
        std::vector<std::string> representation;
    };
    std::vector<Row> rows;     // first top_n topics
    int covered_docs = 0;      // documents inside the reported topics
    int clustered_docs = 0;    // all non-outlier documents
    double coverage = 0.0;     // covered/clustered (0 when nothing clustered)

    std::string to_text() const;
};

TopicReport topic_report(const std::vector<Topic>& topics, int top_n);

// 2-D projection of topic centroids; fills each topic's map_xy and renders
// circles with radius proportional to sqrt(count).
struct MapArtifact {
    nlohmann::json points;  // [{topic_id, x, y, r}, …]
    std::string svg;
};

MapArtifact intertopic_map(std::vector<Topic>& topics, std::uint64_t seed);

nlohmann::json topics_to_json(const std::vector<Topic>& topics);
std::vector<Topic> topics_from_json(const nlohmann::json& j);
std::string topics_to_csv(const std::vector<Topic>& topics);

}  // namespace sedigest::topic_model
