// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is 0 only when every selected criterion passes. An optional
// argv[1] runs a single criterion by number.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "sedigest/cluster.hpp"
#include "sedigest/ingest.hpp"
#include "sedigest/pipeline.hpp"
#include "sedigest/prep.hpp"
#include "sedigest/rng.hpp"
#include "sedigest/summarize.hpp"
#include "sedigest/topic_model.hpp"
#include "sedigest/vector_space.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sedigest;

namespace {

struct Failure {
    std::string detail;
};

void require(bool ok, const std::string& detail) {
    if (!ok) throw Failure{detail};
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("sedigest_accept_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(bool(in), "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sha256_hex(const fs::path& path) {
    std::string bytes = slurp(path);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1,
            "digest failed for " + path.string());
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

// Corpus slices wired the way the pipeline wires them.
struct MiniCorpus {
    std::vector<Post> posts;
    std::vector<prep::CleanDocument> docs;
    ingest::CorpusIndex index;

    void finish() {
        const prep::Stopwords& stops = prep::Stopwords::builtin();
        docs.clear();
        for (const Post& post : posts) {
            docs.push_back(prep::normalize(ingest::strip_code(post), stops));
        }
        index = ingest::questions_of(posts);
    }
    summarize::CorpusView view() const { return {posts, docs, index}; }
};

Post make_question(std::int64_t id, const std::string& body) {
    Post q;
    q.id = id;
    q.post_type = PostType::question;
    q.body_html = body;
    q.creation_date = 1600000000 + id;
    return q;
}

Post make_answer(std::int64_t id, std::int64_t parent, int score, bool accepted,
                 const std::string& body) {
    Post a;
    a.id = id;
    a.post_type = PostType::answer;
    a.parent_id = parent;
    a.score = score;
    a.accepted = accepted;
    a.body_html = body;
    a.creation_date = 1600000000 + id;
    return a;
}

// --- criterion 1: planted topic recovery -----------------------------------

void criterion_recovery() {
    synth::Params sp;
    sp.topic_count = 3;
    sp.vocab_per_topic = 50;
    sp.questions_per_topic = 100;
    sp.noise_questions = 30;
    sp.answered_per_topic = 0;
    sp.seed = 11;
    synth::Corpus corpus = synth::make_corpus(sp);

    fs::path dir = fresh_dir("recovery");
    write_file(dir / "corpus.jsonl", synth::to_jsonl(corpus));

    pipeline::PipelineConfig config;
    config.corpus_path = (dir / "corpus.jsonl").string();
    config.seed = 42;
    config.embedder.seed = 42;
    config.embedder.dimension = 256;
    config.reduce_dim = 64;
    config.top_n = 3;
    config.out_dir = (dir / "out").string();

    auto start = std::chrono::steady_clock::now();
    pipeline::run_all(config, /*jobs=*/1);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require(seconds < 60.0, "pipeline took " + std::to_string(seconds) + " s");

    pipeline::OutPaths paths{config.out_dir};
    auto topics = pipeline::read_topics(paths.topics());
    require(topics.size() == 3,
            "expected 3 topics, found " + std::to_string(topics.size()));

    std::int64_t agreeing = 0, members = 0;
    for (const auto& topic : topics) {
        std::map<int, std::int64_t> by_label;
        for (std::int64_t id : topic.member_ids) ++by_label[corpus.label.at(id)];
        std::int64_t best = 0;
        for (auto [label, count] : by_label) best = std::max(best, count);
        agreeing += best;
        members += static_cast<std::int64_t>(topic.member_ids.size());
    }
    double purity = members == 0 ? 0.0 : double(agreeing) / double(members);
    require(purity >= 0.90, "purity " + std::to_string(purity));
}

// --- criterion 2: class tf-idf hand fixture --------------------------------

void criterion_class_tfidf() {
    prep::CleanDocument one;
    one.post_id = 1;
    one.tokens = {"a", "a", "a", "a", "b", "b"};
    prep::CleanDocument two;
    two.post_id = 2;
    two.tokens = {"b", "b", "c", "c", "c", "c"};
    auto scores = topic_model::ctfidf({{1, {&one}}, {2, {&two}}});

    auto close = [](double x, double y) { return std::abs(x - y) < 1e-9; };
    const auto& first = scores.at(1);
    const auto& second = scores.at(2);
    require(close(first.at("a"), 3.6651629274966204), "score(a, class 1)");
    require(close(first.at("b"), 1.8325814637483102), "score(b, class 1)");
    require(first.count("c") == 0, "term absent from class 1 must score 0 (omitted)");
    require(close(second.at("c"), 3.6651629274966204), "score(c, class 2)");
    require(close(second.at("b"), 1.8325814637483102), "score(b, class 2)");
    require(second.count("a") == 0, "term absent from class 2 must score 0 (omitted)");
}

// --- criterion 3: spanning tree vs exhaustive enumeration ------------------

std::vector<Eigen::VectorXf> random_points(std::mt19937_64& gen, int n, int dim) {
    std::vector<Eigen::VectorXf> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        p.resize(dim);
        for (int d = 0; d < dim; ++d) {
            p[d] = static_cast<float>(rng::uniform01(gen) * 10.0);
        }
    }
    return pts;
}

void criterion_mst() {
    std::mt19937_64 gen(33);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 3 + static_cast<int>(rng::uniform_below(gen, 6));  // 3..8
        auto pts = random_points(gen, n, 2);
        int k = std::min(2, n - 1);
        auto core = cluster::core_distances(pts, k);
        cluster::MutualReachability graph{pts, core};
        auto edges = cluster::minimum_spanning_tree(graph);
        require(edges.size() == static_cast<std::size_t>(n - 1),
                "trial " + std::to_string(trial) + ": edge count");

        std::vector<double> weights;
        for (const auto& e : edges) weights.push_back(e.weight);
        double lib_total = oracle::sorted_sum(weights);

        std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                dist[i][j] = i == j ? 0.0 : graph(static_cast<std::size_t>(i),
                                                  static_cast<std::size_t>(j));
            }
        }
        double best = oracle::mst_min_total(dist);
        require(lib_total == best, "trial " + std::to_string(trial) + ": total " +
                                       std::to_string(lib_total) + " vs " +
                                       std::to_string(best));
    }
}

// --- criterion 4: flat extraction vs best antichain ------------------------

void criterion_extraction() {
    std::mt19937_64 gen(44);
    int nontrivial = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int n = 6 + static_cast<int>(rng::uniform_below(gen, 7));  // 6..12
        auto pts = random_points(gen, n, 2);
        int k = std::min(2, n - 1);
        auto core = cluster::core_distances(pts, k);
        cluster::MutualReachability graph{pts, core};
        auto tree = cluster::condense(cluster::minimum_spanning_tree(graph), n, 2);
        cluster::Clustering clustering = cluster::extract(tree, n);

        std::set<int> cluster_ids;
        for (const auto& rec : tree) {
            if (rec.parent != n) cluster_ids.insert(rec.parent);
            if (rec.child >= n && rec.child != n) cluster_ids.insert(rec.child);
        }
        if (cluster_ids.size() >= 2) ++nontrivial;

        double selected_total = 0.0;
        for (int id : clustering.selected) {
            if (id != n) selected_total += clustering.stabilities.at(id);
        }
        double best = oracle::best_antichain_stability(tree, clustering.stabilities, n);
        require(std::abs(selected_total - best) <= 1e-9,
                "trial " + std::to_string(trial) + ": selected " +
                    std::to_string(selected_total) + " vs best " + std::to_string(best));
    }
    require(nontrivial >= 20,
            "only " + std::to_string(nontrivial) + " instances offered a real choice");
}

// --- criterion 5: greedy summary vs exhaustive search ----------------------

void criterion_summaries() {
    const char* vocab[] = {"gradle", "plugin", "daemon",  "kotlin", "cache",
                           "compile", "emulator", "manifest", "sync"};
    const prep::Stopwords& stops = prep::Stopwords::builtin();
    std::mt19937_64 gen(55);
    int redundancy_fired = 0;

    for (int trial = 0; trial < 20; ++trial) {
        std::string shared;  // identical sentence planted in several posts
        for (int w = 0; w < 8; ++w) {
            if (w > 0) shared += ' ';
            shared += vocab[rng::uniform_below(gen, 9)];
        }
        shared += '.';

        MiniCorpus corpus;
        int nq = 3 + static_cast<int>(rng::uniform_below(gen, 4));  // 3..6
        for (int q = 0; q < nq; ++q) {
            std::string body = "<p>";
            if (q % 2 == 0) body += shared + " ";
            int sentences = 1 + static_cast<int>(rng::uniform_below(gen, 4));
            for (int s = 0; s < sentences; ++s) {
                if (s > 0) body += ' ';
                for (int w = 0; w < 4; ++w) {
                    if (w > 0) body += ' ';
                    body += vocab[rng::uniform_below(gen, 9)];
                }
                body += '.';
            }
            body += "</p>";
            corpus.posts.push_back(make_question(q + 1, body));
        }
        corpus.finish();
        auto view = corpus.view();

        topic_model::Topic topic;
        topic.topic_id = 1;
        for (int q = 0; q < nq; ++q) topic.member_ids.push_back(q + 1);

        vector_space::EmbedderSpec spec;
        spec.dimension = 64;
        spec.seed = 5;
        auto df = vector_space::build_df(corpus.docs);
        summarize::SummarizeParams params;
        params.k_questions = 1 + static_cast<int>(rng::uniform_below(gen, 3));  // 1..3
        params.seed = 7;

        summarize::Summary got = summarize::summarize_topic_questions(
            topic, view, spec, df, stops, params);

        // Rebuild the candidate pool exactly as the summarizer does.
        struct Entry {
            std::string text;
            std::int64_t post_id;
            int position;
        };
        std::vector<Entry> pool;
        std::vector<std::string> texts;
        for (std::int64_t id : topic.member_ids) {
            const auto* doc = view.doc_of(id);
            int position = 0;
            for (auto [begin, end] : doc->sentence_spans) {
                pool.push_back({doc->text.substr(begin, end - begin), id, position++});
                texts.push_back(pool.back().text);
            }
        }
        require(pool.size() <= 50, "pool unexpectedly large");
        auto embeddings = vector_space::embed_sentences(texts, spec, df, stops);
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(spec.dimension);
        for (const auto& e : embeddings) centroid += e.cast<double>();
        centroid /= double(embeddings.size());
        Eigen::VectorXf centroid_f = centroid.cast<float>();

        std::vector<oracle::PoolSentence> oracle_pool;
        std::vector<double> scores;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            bool zero = !(embeddings[i].array() != 0.0f).any();
            double score = zero ? -1.0 : vector_space::cosine(embeddings[i], centroid_f);
            scores.push_back(score);
            oracle_pool.push_back({pool[i].post_id, pool[i].position, score});
        }
        auto best = oracle::best_summary_subset(oracle_pool, embeddings,
                                                params.k_questions, params.redundancy_cos);

        require(got.items.size() == best.size(),
                "trial " + std::to_string(trial) + ": summary size " +
                    std::to_string(got.items.size()) + " vs exhaustive " +
                    std::to_string(best.size()));
        for (std::size_t j = 0; j < best.size(); ++j) {
            const auto& item = got.items[j];
            const auto& want = pool[best[j]];
            require(item.text == want.text && item.source_post_id == want.post_id &&
                        item.score == scores[best[j]],
                    "trial " + std::to_string(trial) + ": item " + std::to_string(j) +
                        " differs from the exhaustive optimum");
        }

        // Verbatim: each emitted sentence appears in its source document.
        for (const auto& item : got.items) {
            const auto* doc = view.doc_of(item.source_post_id);
            require(doc && doc->text.find(item.text) != std::string::npos,
                    "summary sentence is not verbatim from post " +
                        std::to_string(item.source_post_id));
        }

        // Did the redundancy rule visibly reject anything this trial?
        double floor = got.items.empty() ? 2.0 : got.items.back().score;
        std::set<std::size_t> chosen(best.begin(), best.end());
        bool fired = false;
        for (std::size_t i = 0; i < pool.size() && !fired; ++i) {
            if (chosen.count(i) || scores[i] < floor) continue;
            for (std::size_t c : chosen) {
                if (vector_space::cosine(embeddings[i], embeddings[c]) >
                    params.redundancy_cos) {
                    fired = true;
                    break;
                }
            }
        }
        if (fired) ++redundancy_fired;
    }
    require(redundancy_fired >= 1, "no trial exercised the redundancy rule");
}

// --- criterion 6: answer filter regime --------------------------------------

void criterion_answer_filter() {
    std::vector<Post> posts;
    posts.push_back(make_question(1, "<p>how do i install the plugin?</p>"));
    posts.push_back(make_answer(10, 1, 0, true, "<p>accepted but unloved.</p>"));
    posts.push_back(make_answer(11, 1, 1, false, "<p>middling answer.</p>"));
    posts.push_back(make_answer(12, 1, 2, false, "<p>decent answer.</p>"));
    posts.push_back(make_answer(13, 1, 4, false, "<p>great answer.</p>"));

    double mean = summarize::answer_threshold(posts);
    require(mean > 1.0 && mean <= 2.0,
            "fixture mean " + std::to_string(mean) + " is outside (1, 2]");

    summarize::AnswerFilterPolicy policy;
    policy.global_mean = mean;
    std::vector<const Post*> answers;
    for (const Post& p : posts) {
        if (p.is_answer()) answers.push_back(&p);
    }
    std::set<std::int64_t> kept;
    for (const Post* a : summarize::filter_answers(answers, policy)) kept.insert(a->id);

    std::set<std::int64_t> expected;
    for (const Post* a : answers) {
        if (a->accepted || a->score >= 2) expected.insert(a->id);
    }
    require(expected == std::set<std::int64_t>{10, 12, 13}, "fixture construction");
    require(kept == expected, "kept set differs from {accepted} + {score >= 2}");
}

// --- criterion 7: code stripping ---------------------------------------------

void criterion_code_strip() {
    struct Fixture {
        std::string body;
        std::string expected;
        int removed;
        std::optional<std::string> title;
        bool unclosed = false;
    };
    // Every code span carries a ZZQ sentinel; expected strings hold the full
    // surviving prose in order.
    std::vector<Fixture> fixtures = {
        {"<p>alpha beta</p><pre><code>ZZQ1 = code();</code></pre><p>gamma</p>",
         "alpha beta gamma", 1, {}},
        {"<p>use <code>ZZQ2()</code> to build</p>", "use to build", 1, {}},
        {"<pre><code>ZZQ3a</code> ZZQ3b</pre>tail", "tail", 1, {}},
        {"<p>alpha <code>ZZQ4", "alpha", 1, {}, true},
        {"<p>before</p><pre>ZZQ5 = 1", "before", 1, {}, true},
        {"<p>a &amp; b &lt;i&gt; c</p>", "a & b i c", 0, {}},
        {"<p>x</p><code>&amp;ZZQ7;</code><p>y</p>", "x y", 1, {}},
        {"<pre class=\"lang-cpp\"><code>int ZZQ8;</code></pre><p>tail text</p>",
         "tail text", 1, {}},
        {"<p>one</p><code>ZZQ9A</code><p>two</p><code>ZZQ9B</code><p>three</p>",
         "one two three", 2, {}},
        {"<p>body follows</p><code>ZZQ10</code>",
         "how to configure alpha. body follows", 1, std::string("how to configure alpha")},
        {"<blockquote><p>quoted words</p></blockquote><pre><code>ZZQ11\nZZQ11B();"
         "</code></pre>",
         "quoted words", 1, {}},
        {"<p>visible</p><!-- hidden ZZQ12 --><p>after</p>", "visible after", 0, {}},
        {"<P>upper</P><CODE>ZZQ13</CODE><p>lower</p>", "upper lower", 1, {}},
        {"<code class=\"x\">ZZQ14</code><p>attr tail</p>", "attr tail", 1, {}},
        {"<p>line one<br/>line two</p>", "line one line two", 0, {}},
        {"<p>caf&#233; costs &#x41;1 &euro;</p>", "café costs A1 &euro;", 0, {}},
        {"<p>alpha <b>beta</p><p>gamma</p>", "alpha beta gamma", 0, {}},
        {"free text <code>ZZQ18</code> more text", "free text more text", 1, {}},
        {"<pre>ZZQ19a\nZZQ19b</pre><p>after pre</p>", "after pre", 1, {}},
        {"<p>&lt;code&gt; is the marker</p><code>ZZQ20</code>", "code is the marker", 1,
         {}},
    };
    require(fixtures.size() == 20, "fixture count");

    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        const Fixture& f = fixtures[i];
        Post post = make_question(static_cast<std::int64_t>(i + 1), f.body);
        post.title = f.title;
        WarningLog warnings;
        ingest::StrippedText stripped = ingest::strip_code(post, {}, &warnings);
        require(stripped.text.find("ZZQ") == std::string::npos,
                "fixture " + std::to_string(i + 1) + " leaked code bytes: " + stripped.text);
        require(stripped.text == f.expected,
                "fixture " + std::to_string(i + 1) + ": got \"" + stripped.text +
                    "\", want \"" + f.expected + "\"");
        require(stripped.removed_code_blocks == f.removed,
                "fixture " + std::to_string(i + 1) + ": removed " +
                    std::to_string(stripped.removed_code_blocks));
        require(f.unclosed == !warnings.empty(),
                "fixture " + std::to_string(i + 1) + ": unclosed-tag warning mismatch");
    }
}

// --- criterion 8: byte-identical reruns -------------------------------------

void criterion_determinism() {
    const char* bin = std::getenv("SEDIGEST_BIN");
    const char* src = std::getenv("SEDIGEST_SOURCE_DIR");
    require(bin && *bin, "SEDIGEST_BIN is not set");
    require(src && *src, "SEDIGEST_SOURCE_DIR is not set");

    fs::path dir = fresh_dir("determinism");
    fs::path out = dir / "out";
    json config = {{"corpus_path", std::string(src) + "/data/sample_corpus.jsonl"},
                   {"seed", 42},
                   {"embedder", {{"kind", "hashed_tfidf"}, {"dimension", 256}}},
                   {"reduce_dim", 64},
                   {"cluster", {{"min_cluster_size", 15}}},
                   {"top_n", 10},
                   {"out_dir", out.string()}};
    fs::path config_path = dir / "config.json";
    write_file(config_path, config.dump(2) + "\n");

    auto run_once = [&](const char* log_name) {
        std::string cmd = "\"" + std::string(bin) + "\" run -c \"" + config_path.string() +
                          "\" -j 2 > \"" + (dir / log_name).string() + "\" 2>&1";
        int rc = std::system(cmd.c_str());
        require(rc == 0, std::string("`run` exited nonzero; see ") + log_name);
    };

    run_once("run1.log");
    pipeline::OutPaths paths{out.string()};
    std::map<std::string, std::string> first;
    for (const auto& p : paths.all()) {
        require(fs::exists(p), p + " was not written");
        first[p] = sha256_hex(p);
    }
    require(first.size() == 10, "expected 10 artifacts");

    run_once("run2.log");
    for (const auto& p : paths.all()) {
        require(sha256_hex(p) == first.at(p), "artifact changed between runs: " + p);
    }
}

// --- criterion 9: report schema ----------------------------------------------

void criterion_report_schema() {
    synth::Params sp;
    sp.topic_count = 3;
    sp.vocab_per_topic = 50;
    sp.questions_per_topic = 40;
    sp.noise_questions = 5;
    sp.seed = 21;
    fs::path dir = fresh_dir("schema");
    write_file(dir / "corpus.jsonl", synth::to_jsonl(synth::make_corpus(sp)));

    pipeline::PipelineConfig config;
    config.corpus_path = (dir / "corpus.jsonl").string();
    config.seed = 42;
    config.embedder.seed = 42;
    config.embedder.dimension = 256;
    config.reduce_dim = 64;
    config.cluster_params.min_cluster_size = 12;
    config.out_dir = (dir / "out").string();

    pipeline::Documents documents = pipeline::run_ingest(config);
    pipeline::TopicsResult modeled = pipeline::run_topics(config, documents, 1);
    require(modeled.topics.size() >= 2, "corpus produced too few topics to check");

    json topics = topic_model::topics_to_json(modeled.topics);
    require(topics.is_array() && topics.size() == modeled.topics.size(), "topics.json shape");
    for (std::size_t i = 0; i < topics.size(); ++i) {
        const json& t = topics[i];
        require(t.at("topic_id").is_number_integer() &&
                    t.at("topic_id") == static_cast<int>(i + 1),
                "topic_id must rank from 1");
        require(t.at("count").is_number_integer() && t.at("count").get<int>() > 0, "count");
        require(t.at("name").is_string(), "name type");
        const json& rep = t.at("representation");
        require(rep.is_array() && rep.size() == 10, "representation must hold 10 terms");
        for (const json& term : rep) require(term.is_string(), "representation term type");
        std::string name;
        for (int w = 0; w < 4; ++w) {
            if (w > 0) name += '_';
            name += rep[w].get<std::string>();
        }
        require(t.at("name") == name, "name must join the first 4 terms with '_'");
        if (i > 0) {
            require(topics[i - 1].at("count").get<int>() >= t.at("count").get<int>(),
                    "topics must be ordered by descending count");
        }
    }

    std::istringstream csv(topic_model::topics_to_csv(modeled.topics));
    std::string line;
    require(bool(std::getline(csv, line)), "csv is empty");
    require(line == "topic_id,count,name,representation", "csv header: " + line);
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        require(rows < topics.size(), "csv has more rows than topics");
        const json& t = topics[rows];
        std::string rep;
        for (const json& term : t.at("representation")) {
            if (!rep.empty()) rep += ';';
            rep += term.get<std::string>();
        }
        std::string want = std::to_string(t.at("topic_id").get<int>()) + "," +
                           std::to_string(t.at("count").get<int>()) + "," +
                           t.at("name").get<std::string>() + ",\"" + rep + "\"";
        require(line == want, "csv row " + std::to_string(rows + 1) + ": " + line);
        ++rows;
    }
    require(rows == topics.size(), "csv row count");
}

// --- criterion 10: problem/solution provenance -------------------------------

void criterion_paired_report() {
    synth::Params sp;
    sp.topic_count = 3;
    sp.vocab_per_topic = 40;
    sp.questions_per_topic = 40;
    sp.noise_questions = 0;
    sp.answered_per_topic = 40;  // every question carries answers
    sp.answers_per_question = 2;
    sp.score_plan = synth::ScorePlan::accepted_plus_junk;
    sp.seed = 99;
    synth::Corpus corpus = synth::make_corpus(sp);

    fs::path dir = fresh_dir("paired");
    write_file(dir / "corpus.jsonl", synth::to_jsonl(corpus));

    pipeline::PipelineConfig config;
    config.corpus_path = (dir / "corpus.jsonl").string();
    config.seed = 42;
    config.embedder.seed = 42;
    config.embedder.dimension = 256;
    config.reduce_dim = 64;
    config.out_dir = (dir / "out").string();

    pipeline::Documents documents = pipeline::run_ingest(config);
    require(summarize::answer_threshold(documents.posts) == 1.0,
            "constructed mean answer score must be exactly 1");

    pipeline::TopicsResult modeled = pipeline::run_topics(config, documents, 1);
    require(modeled.topics.size() >= 2, "corpus produced too few topics to check");
    summarize::SummaryOutputs outputs =
        pipeline::run_summarize(config, documents, modeled.topics);

    ingest::CorpusIndex index = ingest::questions_of(documents.posts);
    auto doc_text = [&](std::int64_t id) -> const std::string& {
        return documents.docs[index.by_id.at(id)].text;
    };

    int problems_seen = 0;
    for (const json& per_topic : outputs.answer_summaries) {
        for (const json& problem : per_topic.at("problems")) {
            ++problems_seen;
            std::int64_t qid = problem.at("question_id").get<std::int64_t>();
            auto accepted = corpus.accepted_answer.find(qid);
            require(accepted != corpus.accepted_answer.end(),
                    "problem question " + std::to_string(qid) + " has no planted answer");
            const json& solutions = problem.at("solutions");
            require(solutions.size() == 1, "question " + std::to_string(qid) +
                                               ": expected exactly one solution");
            std::int64_t aid = solutions[0].at("answer_id").get<std::int64_t>();
            require(aid == accepted->second,
                    "question " + std::to_string(qid) + ": solution came from answer " +
                        std::to_string(aid) + ", not the qualifying answer " +
                        std::to_string(accepted->second));
            std::string text = solutions[0].at("text").get<std::string>();
            require(doc_text(aid).find(text) != std::string::npos,
                    "solution sentence is not verbatim from answer " + std::to_string(aid));
            require(doc_text(qid).find(problem.at("text").get<std::string>()) !=
                        std::string::npos,
                    "problem sentence is not verbatim from question " + std::to_string(qid));
        }
    }
    require(problems_seen >= 5, "only " + std::to_string(problems_seen) +
                                    " problems were reported; pairing check is vacuous");
}

struct Criterion {
    const char* description;
    void (*run)();
};

const Criterion kCriteria[] = {
    {"planted topics recovered (3 topics, purity >= 0.90, under 60 s)", criterion_recovery},
    {"class-based tf-idf hand fixture within 1e-9", criterion_class_tfidf},
    {"spanning tree matches exhaustive enumeration on 100 instances", criterion_mst},
    {"cluster selection matches the best antichain on 50 instances", criterion_extraction},
    {"greedy summaries equal exhaustive search and stay verbatim", criterion_summaries},
    {"answer filter keeps exactly {accepted} + {score >= 2} for a mean in (1,2]",
     criterion_answer_filter},
    {"code stripping leaks nothing and keeps prose in order (20 fixtures)",
     criterion_code_strip},
    {"rerunning `run` with one seed yields byte-identical artifacts",
     criterion_determinism},
    {"topic report columns, 10-term representation, 4-term names",
     criterion_report_schema},
    {"every reported problem pairs with its question's qualifying answer",
     criterion_paired_report},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1-10]\n", argv[0]);
            return 2;
        }
    }
    int failures = 0;
    for (int i = 0; i < 10; ++i) {
        if (only && only != i + 1) continue;
        std::string detail;
        try {
            kCriteria[i].run();
        } catch (const Failure& f) {
            detail = f.detail;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        if (detail.empty()) {
            std::printf("PASS  %2d  %s\n", i + 1, kCriteria[i].description);
        } else {
            std::printf("FAIL  %2d  %s (%s)\n", i + 1, kCriteria[i].description,
                        detail.c_str());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
