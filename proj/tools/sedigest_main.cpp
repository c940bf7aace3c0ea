// Command-line front end: one subcommand per pipeline stage plus `run`.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "sedigest/pipeline.hpp"
#include "sedigest/se_client.hpp"

namespace {

using nlohmann::json;
using sedigest::UsageError;
namespace pipeline = sedigest::pipeline;
namespace se = sedigest::se_client;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> top_n;
    std::optional<std::string> out_dir;
    int jobs = 0;  // 0 -> hardware concurrency
};

void add_common_flags(CLI::App& cmd, Options& opts) {
    cmd.add_option("-c,--config", opts.config_path, "pipeline config (JSON)")->required();
    cmd.add_option(
        "--seed",
        [&opts](const CLI::results_t& vals) {
            try {
                opts.seed = std::stoull(vals.at(0));
            } catch (const std::exception&) {
                return false;
            }
            return true;
        },
        "override the config seed");
    cmd.add_option(
        "--top-n",
        [&opts](const CLI::results_t& vals) {
            try {
                opts.top_n = std::stoi(vals.at(0));
            } catch (const std::exception&) {
                return false;
            }
            return true;
        },
        "override how many topics the report covers");
    cmd.add_option(
        "--out",
        [&opts](const CLI::results_t& vals) {
            opts.out_dir = vals.at(0);
            return true;
        },
        "override the output directory");
    cmd.add_option("-j,--jobs", opts.jobs, "worker thread cap (0 = all cores)");
}

pipeline::PipelineConfig load_config(const Options& opts) {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) throw UsageError("cannot open config: " + opts.config_path);
    json raw;
    try {
        raw = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config " + opts.config_path + ": " + e.what());
    }
    if (!raw.is_object()) {
        throw UsageError("config " + opts.config_path + ": must be a JSON object");
    }
    // Flag overrides behave exactly as if written in the file.
    if (opts.seed) raw["seed"] = *opts.seed;
    if (opts.top_n) raw["top_n"] = *opts.top_n;
    if (opts.out_dir) raw["out_dir"] = *opts.out_dir;
    try {
        return pipeline::PipelineConfig::from_json(raw);
    } catch (const UsageError& e) {
        throw UsageError("config " + opts.config_path + ": " + e.what());
    }
}

int effective_jobs(const Options& opts) {
    if (opts.jobs > 0) return opts.jobs;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void print_warnings(const sedigest::WarningLog& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_ingest(const Options& opts) {
    pipeline::PipelineConfig config = load_config(opts);
    config.validate();
    sedigest::WarningLog warnings;
    pipeline::Documents documents = pipeline::run_ingest(config, &warnings);
    pipeline::OutPaths paths{config.out_dir};
    pipeline::write_documents(paths.documents(), documents);
    print_warnings(warnings);
    auto stats = documents.stats();
    std::cout << "ingested " << stats.total << " posts (" << stats.questions << " questions, "
              << stats.answers << " answers) -> " << paths.documents() << "\n";
    return 0;
}

int cmd_topics(const Options& opts) {
    pipeline::PipelineConfig config = load_config(opts);
    config.validate();
    pipeline::OutPaths paths{config.out_dir};
    pipeline::Documents documents = pipeline::read_documents(paths.documents());
    sedigest::WarningLog warnings;
    pipeline::TopicsResult modeled =
        pipeline::run_topics(config, documents, effective_jobs(opts), &warnings);
    sedigest::vector_space::write_embd(paths.vectors(), modeled.vectors);
    pipeline::write_json(
        paths.clustering(),
        sedigest::cluster::clustering_to_json(modeled.clustering, config.cluster_params));
    pipeline::write_json(paths.topics(), sedigest::topic_model::topics_to_json(modeled.topics));
    pipeline::write_text(paths.topics_csv(),
                         sedigest::topic_model::topics_to_csv(modeled.topics));
    print_warnings(warnings);
    std::cout << sedigest::topic_model::topic_report(modeled.topics, config.top_n).to_text();
    return 0;
}

int cmd_map(const Options& opts) {
    pipeline::PipelineConfig config = load_config(opts);
    config.validate();
    pipeline::OutPaths paths{config.out_dir};
    std::vector<sedigest::topic_model::Topic> topics = pipeline::read_topics(paths.topics());
    if (!topics.empty()) {
        sedigest::topic_model::MapArtifact map = pipeline::run_map(config, topics);
        pipeline::write_json(paths.map_json(), json{{"points", map.points}});
        pipeline::write_text(paths.map_svg(), map.svg);
    } else {
        pipeline::write_json(paths.map_json(), json{{"points", json::array()}});
        pipeline::write_text(
            paths.map_svg(),
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"720\"/>\n");
    }
    std::cout << "mapped " << topics.size() << " topics -> " << paths.map_json() << ", "
              << paths.map_svg() << "\n";
    return 0;
}

int cmd_summarize(const Options& opts) {
    pipeline::PipelineConfig config = load_config(opts);
    config.validate();
    pipeline::OutPaths paths{config.out_dir};
    pipeline::Documents documents = pipeline::read_documents(paths.documents());
    std::vector<sedigest::topic_model::Topic> topics = pipeline::read_topics(paths.topics());
    sedigest::WarningLog warnings;
    sedigest::summarize::SummaryOutputs outputs =
        pipeline::run_summarize(config, documents, topics, &warnings);
    pipeline::write_json(paths.question_summaries(), outputs.question_summaries);
    pipeline::write_json(paths.answer_summaries(), outputs.answer_summaries);
    print_warnings(warnings);
    std::cout << "summarized " << topics.size() << " topics -> "
              << paths.question_summaries() << ", " << paths.answer_summaries() << "\n";
    return 0;
}

int cmd_run(const Options& opts) {
    pipeline::PipelineConfig config = load_config(opts);
    sedigest::WarningLog warnings;
    sedigest::topic_model::TopicReport report =
        pipeline::run_all(config, effective_jobs(opts), &warnings);
    print_warnings(warnings);
    std::cout << report.to_text();
    return 0;
}

struct FetchOptions {
    std::string tag;
    std::string site = "stackoverflow";
    std::string from_date;
    std::string to_date;
    int page_size = 100;
    std::optional<int> max_pages;
};

std::int64_t parse_date_flag(const std::string& value, const char* flag) {
    if (!value.empty() && value.find_first_not_of("0123456789") == std::string::npos) {
        return std::stoll(value);
    }
    try {
        return sedigest::parse_rfc3339(value);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

int cmd_fetch(const Options& opts, const FetchOptions& fetch) {
    pipeline::PipelineConfig config = load_config(opts);
    if (config.corpus_path.empty()) throw UsageError("config requires corpus_path");
    if (config.out_dir.empty()) throw UsageError("config requires out_dir");

    se::FetchSpec spec;
    spec.site = fetch.site;
    spec.tag = fetch.tag;
    spec.from_date = parse_date_flag(fetch.from_date, "--from");
    spec.to_date = parse_date_flag(fetch.to_date, "--to");
    spec.page_size = fetch.page_size;
    spec.max_pages = fetch.max_pages;
    if (const char* key = std::getenv("SE_API_KEY"); key && *key) spec.api_key = key;
    spec.validate();

    auto https = se::make_https_transport();
    se::CachingTransport transport(*https, config.out_dir + "/http_cache");
    se::RealSleeper sleeper;
    se::Client client(transport, sleeper);

    auto progress = [](const se::Progress& p) {
        std::cerr << "page " << p.page;
        if (p.quota_remaining >= 0) std::cerr << " (quota " << p.quota_remaining << ")";
        std::cerr << "\n";
    };

    std::vector<sedigest::Post> questions = client.fetch_questions(spec, progress);
    std::vector<std::int64_t> ids;
    ids.reserve(questions.size());
    for (const sedigest::Post& q : questions) ids.push_back(q.id);
    std::vector<sedigest::Post> answers;
    if (!ids.empty()) answers = client.fetch_answers(ids, spec, progress);

    std::ofstream out(config.corpus_path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write corpus: " + config.corpus_path);
    for (const sedigest::Post& p : questions) {
        out << sedigest::ingest::post_to_json(p).dump() << "\n";
    }
    for (const sedigest::Post& p : answers) {
        out << sedigest::ingest::post_to_json(p).dump() << "\n";
    }
    if (!out) throw UsageError("failed writing corpus: " + config.corpus_path);
    std::cout << "fetched " << questions.size() << " questions, " << answers.size()
              << " answers -> " << config.corpus_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topic digests for Stack-Exchange Q&A corpora"};
    app.require_subcommand(1);

    Options opts;
    FetchOptions fetch;

    CLI::App* fetch_cmd = app.add_subcommand("fetch", "download a tagged corpus via the API");
    add_common_flags(*fetch_cmd, opts);
    fetch_cmd->add_option("--tag", fetch.tag, "question tag")->required();
    fetch_cmd->add_option("--site", fetch.site, "Stack Exchange site")->capture_default_str();
    fetch_cmd->add_option("--from", fetch.from_date, "window start (epoch or RFC3339)")
        ->required();
    fetch_cmd->add_option("--to", fetch.to_date, "window end (epoch or RFC3339)")->required();
    fetch_cmd->add_option("--page-size", fetch.page_size, "items per page [1,100]")
        ->capture_default_str();
    fetch_cmd->add_option(
        "--max-pages",
        [&fetch](const CLI::results_t& vals) {
            try {
                fetch.max_pages = std::stoi(vals.at(0));
            } catch (const std::exception&) {
                return false;
            }
            return true;
        },
        "stop after this many pages per request");

    CLI::App* ingest_cmd = app.add_subcommand("ingest", "parse and clean the corpus");
    add_common_flags(*ingest_cmd, opts);
    CLI::App* topics_cmd = app.add_subcommand("topics", "embed, cluster, and rank topics");
    add_common_flags(*topics_cmd, opts);
    CLI::App* summarize_cmd = app.add_subcommand("summarize", "write the summary artifacts");
    add_common_flags(*summarize_cmd, opts);
    CLI::App* map_cmd = app.add_subcommand("map", "write the intertopic map");
    add_common_flags(*map_cmd, opts);
    CLI::App* run_cmd = app.add_subcommand("run", "execute the whole pipeline");
    add_common_flags(*run_cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fetch_cmd->parsed()) return cmd_fetch(opts, fetch);
        if (ingest_cmd->parsed()) return cmd_ingest(opts);
        if (topics_cmd->parsed()) return cmd_topics(opts);
        if (summarize_cmd->parsed()) return cmd_summarize(opts);
        if (map_cmd->parsed()) return cmd_map(opts);
        if (run_cmd->parsed()) return cmd_run(opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
