#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sedigest/cluster.hpp"
#include "sedigest/common.hpp"
#include "sedigest/ingest.hpp"
#include "sedigest/post.hpp"
#include "sedigest/prep.hpp"
#include "sedigest/summarize.hpp"
#include "sedigest/topic_model.hpp"
#include "sedigest/vector_space.hpp"

namespace sedigest::pipeline {

struct PipelineConfig {
    std::string corpus_path;
    ingest::CorpusFormat format = ingest::CorpusFormat::jsonl;
    bool include_titles = true;
    std::optional<std::string> stopwords_path;
    vector_space::EmbedderSpec embedder;  // seed follows `seed` unless set explicitly
    int reduce_dim = 5;
    cluster::ClusterParams cluster_params;
    int top_n = 80;
    int k_questions = 3;
    int k_answers = 1;
    double redundancy_cos = 0.95;
    int max_pool = 2000;
    std::optional<int> answer_threshold;  // overrides the corpus-mean filter
    std::optional<std::uint64_t> seed;    // mandatory before running
    std::string out_dir = "out";

    static PipelineConfig load(const std::string& path);
    static PipelineConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;  // throws UsageError; requires a seed
    std::uint64_t require_seed() const;
};

// Artifact locations under out_dir.
struct OutPaths {
    std::string dir;

    std::string documents() const { return dir + "/documents.jsonl"; }
    std::string vectors() const { return dir + "/vectors.embd"; }
    std::string clustering() const { return dir + "/clustering.json"; }
    std::string topics() const { return dir + "/topics.json"; }
    std::string topics_csv() const { return dir + "/topics.csv"; }
    std::string map_json() const { return dir + "/map.json"; }
    std::string map_svg() const { return dir + "/map.svg"; }
    std::string question_summaries() const { return dir + "/question_summaries.json"; }
    std::string answer_summaries() const { return dir + "/answer_summaries.json"; }
    std::string manifest() const { return dir + "/run_manifest.json"; }
    std::vector<std::string> all() const;
};

// Corpus posts with their cleaned documents, index-aligned.
struct Documents {
    std::vector<Post> posts;
    std::vector<prep::CleanDocument> docs;
    std::vector<int> removed_code_blocks;

    struct Stats {
        std::int64_t total = 0, questions = 0, answers = 0, empty_after_strip = 0;
    };
    Stats stats() const;
};

// ingest: corpus file -> stripped + normalized documents.
Documents run_ingest(const PipelineConfig& config, WarningLog* warnings = nullptr);
void write_documents(const std::string& path, const Documents& documents);
Documents read_documents(const std::string& path);  // names `ingest` when missing

struct TopicsResult {
    std::vector<vector_space::DocVector> vectors;  // full + reduced
    cluster::Clustering clustering;
    std::vector<topic_model::Topic> topics;
};

// topics: documents -> embeddings, clustering, ranked topics.
TopicsResult run_topics(const PipelineConfig& config, const Documents& documents,
                        int jobs = 1, WarningLog* warnings = nullptr);

// map: topics -> 2-D layout artifact (fills topics' map_xy).
topic_model::MapArtifact run_map(const PipelineConfig& config,
                                 std::vector<topic_model::Topic>& topics);

// summarize: documents + topics -> the two summary artifacts.
summarize::SummaryOutputs run_summarize(const PipelineConfig& config,
                                        const Documents& documents,
                                        const std::vector<topic_model::Topic>& topics,
                                        WarningLog* warnings = nullptr);

// The whole pipeline; writes every artifact plus run_manifest.json and
// returns the report printed by the CLI.
topic_model::TopicReport run_all(const PipelineConfig& config, int jobs = 1,
                                 WarningLog* warnings = nullptr);

// Artifact IO shared by the subcommands.
void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_artifact(const std::string& path, const std::string& producer);
std::vector<topic_model::Topic> read_topics(const std::string& path);

prep::Stopwords load_stopwords(const PipelineConfig& config);

// Derived seeds for the independent random streams of one run.
std::uint64_t reduce_seed(const PipelineConfig& config);
std::uint64_t map_seed(const PipelineConfig& config);

// Sentence scoring always hashes; an external_file embedder falls back to a
// hashed spec with the same dimension floor and run seed.
vector_space::EmbedderSpec sentence_spec(const PipelineConfig& config);

}  // namespace sedigest::pipeline
