#include "sedigest/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "sedigest/parallel.hpp"
#include "sedigest/rng.hpp"

namespace sedigest::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kReduceStream = 0xd1ce;
constexpr std::uint64_t kMapStream = 0x2d9a;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const UsageError& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    PipelineConfig config;
    auto opt = [&](const char* key) -> const json* {
        auto it = j.find(key);
        return it == j.end() || it->is_null() ? nullptr : &*it;
    };
    if (const json* v = opt("corpus_path")) config.corpus_path = v->get<std::string>();
    if (const json* v = opt("format")) {
        config.format = ingest::corpus_format_from_string(v->get<std::string>());
    }
    if (const json* v = opt("include_titles")) config.include_titles = v->get<bool>();
    if (const json* v = opt("stopwords_path")) config.stopwords_path = v->get<std::string>();
    if (const json* v = opt("seed")) config.seed = v->get<std::uint64_t>();
    if (const json* e = opt("embedder")) {
        if (const json* v = e->is_object() ? (e->contains("kind") ? &(*e)["kind"] : nullptr)
                                           : nullptr) {
            config.embedder.kind = vector_space::embedder_kind_from_string(
                v->get<std::string>());
        }
        if (e->contains("dimension") && !(*e)["dimension"].is_null()) {
            config.embedder.dimension = (*e)["dimension"].get<int>();
        }
        if (e->contains("path") && !(*e)["path"].is_null()) {
            config.embedder.path = (*e)["path"].get<std::string>();
        }
        if (e->contains("seed") && !(*e)["seed"].is_null()) {
            config.embedder.seed = (*e)["seed"].get<std::uint64_t>();
        } else if (config.seed) {
            config.embedder.seed = *config.seed;
        }
    } else if (config.seed) {
        config.embedder.seed = *config.seed;
    }
    if (const json* v = opt("reduce_dim")) config.reduce_dim = v->get<int>();
    if (const json* c = opt("cluster")) config.cluster_params = cluster::params_from_json(*c);
    if (const json* v = opt("top_n")) config.top_n = v->get<int>();
    if (const json* v = opt("k_questions")) config.k_questions = v->get<int>();
    if (const json* v = opt("k_answers")) config.k_answers = v->get<int>();
    if (const json* v = opt("redundancy_cos")) config.redundancy_cos = v->get<double>();
    if (const json* v = opt("max_pool")) config.max_pool = v->get<int>();
    if (const json* v = opt("answer_threshold")) config.answer_threshold = v->get<int>();
    if (const json* v = opt("out_dir")) config.out_dir = v->get<std::string>();
    return config;
}

json PipelineConfig::to_json() const {
    json embedder = {{"kind", vector_space::to_string(this->embedder.kind)},
                     {"dimension", this->embedder.dimension},
                     {"seed", this->embedder.seed}};
    if (this->embedder.path) embedder["path"] = *this->embedder.path;
    json j = {{"corpus_path", corpus_path},
              {"format", format == ingest::CorpusFormat::jsonl ? "jsonl" : "sedump_xml"},
              {"include_titles", include_titles},
              {"embedder", embedder},
              {"reduce_dim", reduce_dim},
              {"cluster", cluster::params_to_json(cluster_params)},
              {"top_n", top_n},
              {"k_questions", k_questions},
              {"k_answers", k_answers},
              {"redundancy_cos", redundancy_cos},
              {"max_pool", max_pool},
              {"out_dir", out_dir}};
    if (stopwords_path) j["stopwords_path"] = *stopwords_path;
    if (answer_threshold) j["answer_threshold"] = *answer_threshold;
    if (seed) j["seed"] = *seed;
    return j;
}

std::uint64_t PipelineConfig::require_seed() const {
    if (!seed) throw UsageError("config requires a seed (set \"seed\" or pass --seed)");
    return *seed;
}

void PipelineConfig::validate() const {
    if (corpus_path.empty()) throw UsageError("config requires corpus_path");
    require_seed();
    embedder.validate();
    cluster_params.validate();
    if (reduce_dim < 1) throw UsageError("reduce_dim must be at least 1");
    if (embedder.kind == vector_space::EmbedderSpec::Kind::hashed_tfidf &&
        reduce_dim >= embedder.dimension) {
        throw UsageError("reduce_dim must be below the embedder dimension");
    }
    if (top_n < 1) throw UsageError("top_n must be at least 1");
    if (k_questions < 1) throw UsageError("k_questions must be at least 1");
    if (k_answers < 1) throw UsageError("k_answers must be at least 1");
    if (redundancy_cos <= 0.0 || redundancy_cos > 1.0) {
        throw UsageError("redundancy_cos must lie in (0, 1]");
    }
    if (max_pool < 1) throw UsageError("max_pool must be at least 1");
    if (answer_threshold && *answer_threshold < 0) {
        throw UsageError("answer_threshold must not be negative");
    }
    if (out_dir.empty()) throw UsageError("config requires out_dir");
}

std::vector<std::string> OutPaths::all() const {
    return {documents(), vectors(),  clustering(),         topics(),
            topics_csv(), map_json(), map_svg(),            question_summaries(),
            answer_summaries(), manifest()};
}

Documents::Stats Documents::stats() const {
    Stats s;
    s.total = static_cast<std::int64_t>(posts.size());
    for (const auto& post : posts) {
        if (post.is_question()) ++s.questions;
        else ++s.answers;
    }
    for (const auto& doc : docs) {
        if (doc.tokens.empty()) ++s.empty_after_strip;
    }
    return s;
}

prep::Stopwords load_stopwords(const PipelineConfig& config) {
    if (config.stopwords_path) return prep::Stopwords::load(*config.stopwords_path);
    return prep::Stopwords::builtin();
}

std::uint64_t reduce_seed(const PipelineConfig& config) {
    return rng::mix_seed(config.require_seed(), kReduceStream);
}

std::uint64_t map_seed(const PipelineConfig& config) {
    return rng::mix_seed(config.require_seed(), kMapStream);
}

vector_space::EmbedderSpec sentence_spec(const PipelineConfig& config) {
    vector_space::EmbedderSpec spec = config.embedder;
    if (spec.kind != vector_space::EmbedderSpec::Kind::hashed_tfidf) {
        spec.kind = vector_space::EmbedderSpec::Kind::hashed_tfidf;
        spec.dimension = std::max(spec.dimension, 16);
        spec.path.reset();
        spec.seed = config.require_seed();
    }
    return spec;
}

Documents run_ingest(const PipelineConfig& config, WarningLog* warnings) {
    Documents documents;
    documents.posts = ingest::load_corpus(config.corpus_path, config.format);
    prep::Stopwords stops = load_stopwords(config);
    ingest::StripOptions strip_opts{config.include_titles};
    const std::size_t n = documents.posts.size();
    documents.docs.resize(n);
    documents.removed_code_blocks.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ingest::StrippedText stripped =
            ingest::strip_code(documents.posts[i], strip_opts, warnings);
        documents.removed_code_blocks[i] = stripped.removed_code_blocks;
        documents.docs[i] = prep::normalize(stripped, stops);
    }
    return documents;
}

void write_documents(const std::string& path, const Documents& documents) {
    std::string out;
    for (std::size_t i = 0; i < documents.posts.size(); ++i) {
        const auto& doc = documents.docs[i];
        json spans = json::array();
        for (auto [begin, end] : doc.sentence_spans) spans.push_back({begin, end});
        json line = {{"post", ingest::post_to_json(documents.posts[i])},
                     {"text", doc.text},
                     {"tokens", doc.tokens},
                     {"sentence_spans", spans},
                     {"removed_code_blocks", documents.removed_code_blocks[i]}};
        out += line.dump();
        out.push_back('\n');
    }
    write_text(path, out);
}

Documents read_documents(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError(path + " not found; run `ingest` first");
    }
    Documents documents;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw UsageError(path + ": line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            documents.posts.push_back(ingest::post_from_json(j.at("post")));
            prep::CleanDocument doc;
            doc.post_id = documents.posts.back().id;
            doc.text = j.at("text").get<std::string>();
            doc.tokens = j.at("tokens").get<std::vector<std::string>>();
            for (const auto& span : j.at("sentence_spans")) {
                doc.sentence_spans.emplace_back(span.at(0).get<std::size_t>(),
                                                span.at(1).get<std::size_t>());
            }
            documents.docs.push_back(std::move(doc));
            documents.removed_code_blocks.push_back(j.at("removed_code_blocks").get<int>());
        } catch (const json::exception& e) {
            throw UsageError(path + ": line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return documents;
}

TopicsResult run_topics(const PipelineConfig& config, const Documents& documents,
                        int jobs, WarningLog* warnings) {
    config.validate();
    if (documents.docs.empty()) throw UsageError("no documents to model; corpus is empty");
    TopicsResult result;

    const auto& spec = config.embedder;
    if (spec.kind == vector_space::EmbedderSpec::Kind::hashed_tfidf) {
        vector_space::DfTable df = vector_space::build_df(documents.docs);
        result.vectors.resize(documents.docs.size());
        parallel_for(documents.docs.size(), jobs, [&](std::size_t i) {
            result.vectors[i] = {documents.docs[i].post_id,
                                 vector_space::embed_tokens(documents.docs[i].tokens, spec, df),
                                 {}};
        });
    } else {
        result.vectors = vector_space::embed_corpus(documents.docs, spec);
    }

    const int dim = static_cast<int>(result.vectors.front().full.size());
    if (config.reduce_dim < dim) {
        result.vectors =
            vector_space::reduce(std::move(result.vectors), config.reduce_dim,
                                 reduce_seed(config));
    } else {
        warn(warnings, "reduce_dim " + std::to_string(config.reduce_dim) +
                           " does not reduce the embedding dimension " + std::to_string(dim) +
                           "; clustering in full space");
    }
    result.clustering =
        cluster::cluster_documents(result.vectors, config.cluster_params, warnings);
    result.topics =
        topic_model::build_topics(result.clustering, documents.docs, result.vectors, warnings);
    return result;
}

topic_model::MapArtifact run_map(const PipelineConfig& config,
                                 std::vector<topic_model::Topic>& topics) {
    return topic_model::intertopic_map(topics, map_seed(config));
}

summarize::SummaryOutputs run_summarize(const PipelineConfig& config,
                                        const Documents& documents,
                                        const std::vector<topic_model::Topic>& topics,
                                        WarningLog* warnings) {
    config.validate();
    prep::Stopwords stops = load_stopwords(config);
    ingest::CorpusIndex index = ingest::questions_of(documents.posts);
    summarize::CorpusView view{documents.posts, documents.docs, index};

    summarize::AnswerFilterPolicy policy;
    policy.explicit_threshold = config.answer_threshold;
    if (!config.answer_threshold) {
        bool any_answer = false;
        for (const auto& post : documents.posts) any_answer |= post.is_answer();
        if (any_answer) {
            policy.global_mean = summarize::answer_threshold(documents.posts);
        } else {
            warn(warnings, "corpus has no answers; answer summaries will be empty");
        }
    }

    summarize::SummarizeParams params;
    params.k_questions = config.k_questions;
    params.k_answers = config.k_answers;
    params.redundancy_cos = config.redundancy_cos;
    params.max_pool = config.max_pool;
    params.seed = config.require_seed();

    vector_space::DfTable df = vector_space::build_df(documents.docs);
    return summarize::summarize_all(topics, view, policy, sentence_spec(config), df, stops,
                                    params, warnings);
}

void write_text(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw UsageError("failed writing file: " + path);
}

void write_json(const std::string& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

json read_json_artifact(const std::string& path, const std::string& producer) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(path + " not found; run `" + producer + "` first");
    try {
        return json::parse(std::string(std::istreambuf_iterator<char>(in),
                                       std::istreambuf_iterator<char>()));
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

std::vector<topic_model::Topic> read_topics(const std::string& path) {
    return topic_model::topics_from_json(read_json_artifact(path, "topics"));
}

namespace {

// Prefixes stage failures with the stage name, preserving the usage/runtime
// error split the exit codes depend on.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const UsageError& e) {
        throw UsageError(std::string(name) + ": " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

}  // namespace

topic_model::TopicReport run_all(const PipelineConfig& config, int jobs,
                                 WarningLog* warnings) {
    config.validate();
    WarningLog local;
    WarningLog* log = warnings ? warnings : &local;
    OutPaths paths{config.out_dir};

    Documents documents = stage("ingest", [&] {
        Documents d = run_ingest(config, log);
        write_documents(paths.documents(), d);
        return d;
    });

    TopicsResult modeled = stage("topics", [&] {
        TopicsResult m = run_topics(config, documents, jobs, log);
        vector_space::write_embd(paths.vectors(), m.vectors);
        write_json(paths.clustering(),
                   cluster::clustering_to_json(m.clustering, config.cluster_params));
        write_json(paths.topics(), topic_model::topics_to_json(m.topics));
        write_text(paths.topics_csv(), topic_model::topics_to_csv(m.topics));
        return m;
    });

    stage("map", [&] {
        if (!modeled.topics.empty()) {
            topic_model::MapArtifact map = run_map(config, modeled.topics);
            write_json(paths.map_json(), json{{"points", map.points}});
            write_text(paths.map_svg(), map.svg);
        } else {
            write_json(paths.map_json(), json{{"points", json::array()}});
            write_text(paths.map_svg(),
                       "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
                       "height=\"720\"/>\n");
        }
        return 0;
    });

    stage("summarize", [&] {
        summarize::SummaryOutputs summaries =
            run_summarize(config, documents, modeled.topics, log);
        write_json(paths.question_summaries(), summaries.question_summaries);
        write_json(paths.answer_summaries(), summaries.answer_summaries);
        return 0;
    });

    topic_model::TopicReport report = topic_model::topic_report(modeled.topics, config.top_n);
    Documents::Stats stats = documents.stats();
    json manifest = {
        {"config", config.to_json()},
        {"corpus",
         {{"total_posts", stats.total},
          {"questions", stats.questions},
          {"answers", stats.answers},
          {"empty_after_strip", stats.empty_after_strip}}},
        {"topics",
         {{"count", static_cast<int>(modeled.topics.size())},
          {"outliers", modeled.clustering.outlier_count()},
          {"coverage_top_n", report.coverage}}},
        {"warnings", *log}};
    write_json(paths.manifest(), manifest);
    return report;
}

}  // namespace sedigest::pipeline
