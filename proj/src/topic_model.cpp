#include "sedigest/topic_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sedigest::topic_model {
namespace {

std::string joined(const std::vector<std::string>& terms, std::size_t limit, char sep) {
    std::string out;
    for (std::size_t i = 0; i < terms.size() && i < limit; ++i) {
        if (!out.empty()) out.push_back(sep);
        out += terms[i];
    }
    return out;
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::map<int, std::map<std::string, double>> ctfidf(
    const std::map<int, std::vector<const prep::CleanDocument*>>& classes,
    WarningLog* warnings) {
    std::map<int, std::map<std::string, std::int64_t>> tf;
    std::map<std::string, std::int64_t> total_tf;  // f(t)
    std::int64_t total_tokens = 0;
    for (const auto& [label, docs] : classes) {
        auto& class_tf = tf[label];
        for (const auto* doc : docs) {
            for (const auto& token : doc->tokens) {
                ++class_tf[token];
                ++total_tf[token];
                ++total_tokens;
            }
        }
        if (class_tf.empty()) {
            warn(warnings, "cluster " + std::to_string(label) + " has no tokens");
        }
    }
    const double mean_class_tokens =
        classes.empty() ? 0.0 : double(total_tokens) / double(classes.size());
    std::map<int, std::map<std::string, double>> scores;
    for (const auto& [label, class_tf] : tf) {
        auto& class_scores = scores[label];
        for (const auto& [term, count] : class_tf) {
            class_scores[term] =
                double(count) * std::log(1.0 + mean_class_tokens / double(total_tf[term]));
        }
    }
    return scores;
}

std::vector<Topic> build_topics(const cluster::Clustering& clustering,
                                const std::vector<prep::CleanDocument>& docs,
                                const std::vector<vector_space::DocVector>& vectors,
                                WarningLog* warnings) {
    if (clustering.labels.size() != docs.size() || docs.size() != vectors.size()) {
        throw UsageError("clustering, documents, and vectors are not aligned");
    }
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < clustering.labels.size(); ++i) {
        if (clustering.labels[i] >= 0) members[clustering.labels[i]].push_back(i);
    }
    if (members.empty()) {
        warn(warnings, "clustering produced no topics (everything is an outlier)");
        return {};
    }

    std::map<int, std::vector<const prep::CleanDocument*>> classes;
    for (const auto& [label, idx] : members) {
        auto& list = classes[label];
        list.reserve(idx.size());
        for (std::size_t i : idx) list.push_back(&docs[i]);
    }
    auto scores = ctfidf(classes, warnings);

    std::vector<Topic> topics;
    topics.reserve(members.size());
    for (const auto& [label, idx] : members) {
        Topic topic;
        topic.count = static_cast<int>(idx.size());
        for (std::size_t i : idx) topic.member_ids.push_back(docs[i].post_id);

        const auto& term_scores = scores[label];
        std::vector<std::pair<std::string, double>> ranked(term_scores.begin(),
                                                           term_scores.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
            if (x.second != y.second) return x.second > y.second;
            return x.first < y.first;
        });
        for (std::size_t r = 0; r < ranked.size() && r < 10; ++r) {
            topic.representation.push_back(ranked[r].first);
        }
        topic.name = joined(topic.representation, 4, '_');

        Eigen::VectorXd sum = Eigen::VectorXd::Zero(vectors[idx[0]].full.size());
        for (std::size_t i : idx) sum += vectors[i].full.cast<double>();
        topic.centroid = (sum / double(idx.size())).cast<float>();
        topics.push_back(std::move(topic));
    }

    std::sort(topics.begin(), topics.end(), [](const Topic& x, const Topic& y) {
        if (x.count != y.count) return x.count > y.count;
        return *std::min_element(x.member_ids.begin(), x.member_ids.end()) <
               *std::min_element(y.member_ids.begin(), y.member_ids.end());
    });
    for (std::size_t i = 0; i < topics.size(); ++i) {
        topics[i].topic_id = static_cast<int>(i) + 1;
    }
    return topics;
}

TopicReport topic_report(const std::vector<Topic>& topics, int top_n) {
    if (top_n < 1) throw UsageError("top_n must be at least 1");
    TopicReport report;
    for (const auto& topic : topics) {
        report.clustered_docs += topic.count;
        if (static_cast<int>(report.rows.size()) < top_n) {
            report.rows.push_back(
                {topic.topic_id, topic.count, topic.name, topic.representation});
            report.covered_docs += topic.count;
        }
    }
    report.coverage = report.clustered_docs > 0
                          ? double(report.covered_docs) / double(report.clustered_docs)
                          : 0.0;
    return report;
}

std::string TopicReport::to_text() const {
    std::ostringstream out;
    std::size_t name_width = 4;
    for (const auto& row : rows) name_width = std::max(name_width, row.name.size());
    out << "topic  count  name";
    out << std::string(name_width - 4 + 2, ' ') << "representation\n";
    for (const auto& row : rows) {
        char head[64];
        std::snprintf(head, sizeof head, "%5d  %5d  ", row.topic_id, row.count);
        out << head << row.name << std::string(name_width - row.name.size() + 2, ' ')
            << joined(row.representation, row.representation.size(), ' ') << '\n';
    }
    out << "coverage: " << format_fixed(coverage, 4) << " (" << covered_docs << "/"
        << clustered_docs << " clustered documents in the top " << rows.size()
        << " topics)\n";
    return out.str();
}

MapArtifact intertopic_map(std::vector<Topic>& topics, std::uint64_t seed) {
    if (topics.empty()) throw UsageError("intertopic map requires at least one topic");
    std::vector<Eigen::VectorXf> centroids;
    centroids.reserve(topics.size());
    int max_count = 1;
    for (const auto& topic : topics) {
        centroids.push_back(topic.centroid);
        max_count = std::max(max_count, topic.count);
    }
    auto points = vector_space::map_coordinates(centroids, seed);

    MapArtifact artifact;
    artifact.points = nlohmann::json::array();
    for (std::size_t i = 0; i < topics.size(); ++i) {
        topics[i].map_xy = points[i];
        double r = std::sqrt(double(topics[i].count) / double(max_count));
        artifact.points.push_back({{"topic_id", topics[i].topic_id},
                                   {"x", points[i][0]},
                                   {"y", points[i][1]},
                                   {"r", r}});
    }

    // SVG: unit square mapped into a fixed canvas, radius ~ sqrt(count).
    constexpr int kCanvas = 720;
    constexpr int kMargin = 60;
    constexpr double kMaxRadius = 42.0;
    constexpr double kMinRadius = 7.0;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
        << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " " << kCanvas << "\">\n"
        << "<rect width=\"" << kCanvas << "\" height=\"" << kCanvas
        << "\" fill=\"#ffffff\"/>\n";
    const int span = kCanvas - 2 * kMargin;
    for (std::size_t i = 0; i < topics.size(); ++i) {
        double cx = kMargin + points[i][0] * span;
        double cy = kMargin + (1.0 - points[i][1]) * span;  // y grows upward
        double r = std::sqrt(double(topics[i].count) / double(max_count));
        double radius = kMinRadius + (kMaxRadius - kMinRadius) * r;
        svg << "<circle cx=\"" << format_fixed(cx, 2) << "\" cy=\"" << format_fixed(cy, 2)
            << "\" r=\"" << format_fixed(radius, 2)
            << "\" fill=\"#4c78a8\" fill-opacity=\"0.55\" stroke=\"#27496d\"/>\n";
        svg << "<text x=\"" << format_fixed(cx, 2) << "\" y=\"" << format_fixed(cy, 2)
            << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
               "dy=\"0.35em\">"
            << topics[i].topic_id << "</text>\n";
    }
    svg << "</svg>\n";
    artifact.svg = svg.str();
    return artifact;
}

nlohmann::json topics_to_json(const std::vector<Topic>& topics) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& topic : topics) {
        nlohmann::json centroid = nlohmann::json::array();
        for (Eigen::Index i = 0; i < topic.centroid.size(); ++i) {
            centroid.push_back(topic.centroid[i]);
        }
        nlohmann::json j = {{"topic_id", topic.topic_id},
                            {"count", topic.count},
                            {"name", topic.name},
                            {"representation", topic.representation},
                            {"member_ids", topic.member_ids},
                            {"centroid", centroid}};
        if (topic.map_xy) j["map_xy"] = {(*topic.map_xy)[0], (*topic.map_xy)[1]};
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<Topic> topics_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw UsageError("topics file must hold a JSON array");
    std::vector<Topic> topics;
    for (const auto& item : j) {
        Topic topic;
        topic.topic_id = item.at("topic_id").get<int>();
        topic.count = item.at("count").get<int>();
        topic.name = item.at("name").get<std::string>();
        topic.representation = item.at("representation").get<std::vector<std::string>>();
        topic.member_ids = item.at("member_ids").get<std::vector<std::int64_t>>();
        const auto& centroid = item.at("centroid");
        topic.centroid.resize(static_cast<Eigen::Index>(centroid.size()));
        Eigen::Index i = 0;
        for (const auto& x : centroid) topic.centroid[i++] = x.get<float>();
        if (item.contains("map_xy")) {
            topic.map_xy = {item["map_xy"].at(0).get<double>(),
                            item["map_xy"].at(1).get<double>()};
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

std::string topics_to_csv(const std::vector<Topic>& topics) {
    std::string out = "topic_id,count,name,representation\n";
    for (const auto& topic : topics) {
        out += std::to_string(topic.topic_id);
        out += ',';
        out += std::to_string(topic.count);
        out += ',';
        out += topic.name;
        out += ",\"";
        out += joined(topic.representation, topic.representation.size(), ';');
        out += "\"\n";
    }
    return out;
}

}  // namespace sedigest::topic_model
