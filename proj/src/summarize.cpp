#include "sedigest/summarize.hpp"

#include <algorithm>
#include <numeric>

#include "sedigest/rng.hpp"

namespace sedigest::summarize {
namespace {

constexpr std::uint64_t kQuestionPoolStream = 0x9a0d;
constexpr std::uint64_t kAnswerPoolStream = 0xa15f;

struct Candidate {
    std::string text;
    std::int64_t post_id;
    int position;  // sentence index within its document
    Eigen::VectorXf embedding;
    double score = 0.0;
};

// Pool sentences from the given documents in corpus order.
std::vector<Candidate> collect_sentences(const std::vector<const prep::CleanDocument*>& docs) {
    std::vector<Candidate> pool;
    for (const auto* doc : docs) {
        int position = 0;
        for (auto [begin, end] : doc->sentence_spans) {
            pool.push_back({doc->text.substr(begin, end - begin), doc->post_id, position++,
                            {}, 0.0});
        }
    }
    return pool;
}

void cap_pool(std::vector<Candidate>& pool, int max_pool, std::uint64_t seed) {
    if (max_pool <= 0 || pool.size() <= static_cast<std::size_t>(max_pool)) return;
    auto keep = rng::sample_indices(pool.size(), static_cast<std::size_t>(max_pool), seed);
    std::vector<Candidate> sampled;
    sampled.reserve(keep.size());
    for (std::size_t i : keep) sampled.push_back(std::move(pool[i]));
    pool = std::move(sampled);
}

void score_pool(std::vector<Candidate>& pool, const vector_space::EmbedderSpec& spec,
                const vector_space::DfTable& df, const prep::Stopwords& stops) {
    std::vector<std::string> sentences;
    sentences.reserve(pool.size());
    for (const auto& c : pool) sentences.push_back(c.text);
    auto embeddings = vector_space::embed_sentences(sentences, spec, df, stops);
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(spec.dimension);
    for (const auto& e : embeddings) centroid += e.cast<double>();
    centroid /= double(embeddings.size());
    Eigen::VectorXf centroid_f = centroid.cast<float>();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pool[i].embedding = std::move(embeddings[i]);
        bool zero = !(pool[i].embedding.array() != 0.0f).any();
        pool[i].score = zero ? -1.0 : vector_space::cosine(pool[i].embedding, centroid_f);
    }
}

// Greedy pick by descending score (ties: earlier sentence, smaller post id),
// skipping candidates too close to anything already chosen.
std::vector<std::size_t> select_greedy(const std::vector<Candidate>& pool, int k,
                                       double redundancy_cos) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const Candidate& a = pool[x];
        const Candidate& b = pool[y];
        if (a.score != b.score) return a.score > b.score;
        if (a.position != b.position) return a.position < b.position;
        if (a.post_id != b.post_id) return a.post_id < b.post_id;
        return x < y;
    });
    std::vector<std::size_t> picks;
    for (std::size_t idx : order) {
        if (static_cast<int>(picks.size()) >= k) break;
        bool redundant = false;
        for (std::size_t p : picks) {
            if (vector_space::cosine(pool[idx].embedding, pool[p].embedding) >
                redundancy_cos) {
                redundant = true;
                break;
            }
        }
        if (!redundant) picks.push_back(idx);
    }
    return picks;
}

Summary select_summary(std::vector<Candidate> pool, Summary::Subject subject,
                       std::int64_t subject_id, int k,
                       const vector_space::EmbedderSpec& spec,
                       const vector_space::DfTable& df, const prep::Stopwords& stops,
                       double redundancy_cos) {
    Summary summary;
    summary.subject = subject;
    summary.subject_id = subject_id;
    summary.k = k;
    if (pool.empty()) return summary;
    score_pool(pool, spec, df, stops);
    for (std::size_t idx : select_greedy(pool, k, redundancy_cos)) {
        summary.items.push_back(
            {std::move(pool[idx].text), pool[idx].post_id, pool[idx].score});
    }
    return summary;
}

}  // namespace

const Post* CorpusView::post_of(std::int64_t id) const {
    auto it = index.by_id.find(id);
    return it == index.by_id.end() ? nullptr : &posts[it->second];
}

const prep::CleanDocument* CorpusView::doc_of(std::int64_t id) const {
    auto it = index.by_id.find(id);
    return it == index.by_id.end() ? nullptr : &docs[it->second];
}

double answer_threshold(const std::vector<Post>& corpus) {
    std::int64_t sum = 0;
    std::int64_t count = 0;
    for (const auto& post : corpus) {
        if (post.is_answer()) {
            sum += post.score;
            ++count;
        }
    }
    if (count == 0) throw UsageError("corpus has no answers to average");
    return double(sum) / double(count);
}

std::vector<const Post*> filter_answers(const std::vector<const Post*>& answers,
                                        const AnswerFilterPolicy& policy) {
    const double threshold = policy.threshold();
    std::vector<const Post*> kept;
    for (const Post* answer : answers) {
        if (answer->accepted || double(answer->score) > threshold) kept.push_back(answer);
    }
    return kept;
}

std::vector<double> score_sentences(const std::vector<std::string>& sentences,
                                    const vector_space::EmbedderSpec& spec,
                                    const vector_space::DfTable& df,
                                    const prep::Stopwords& stops) {
    if (sentences.empty()) throw UsageError("score_sentences requires at least one sentence");
    std::vector<Candidate> pool;
    pool.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        pool.push_back({sentences[i], 0, static_cast<int>(i), {}, 0.0});
    }
    score_pool(pool, spec, df, stops);
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (const auto& c : pool) scores.push_back(c.score);
    return scores;
}

Summary summarize_topic_questions(const topic_model::Topic& topic, const CorpusView& view,
                                  const vector_space::EmbedderSpec& spec,
                                  const vector_space::DfTable& df,
                                  const prep::Stopwords& stops,
                                  const SummarizeParams& params, WarningLog* warnings) {
    std::vector<const prep::CleanDocument*> questions;
    for (std::int64_t id : topic.member_ids) {
        const Post* post = view.post_of(id);
        if (post && post->is_question()) {
            if (const auto* doc = view.doc_of(id)) questions.push_back(doc);
        }
    }
    std::vector<Candidate> pool = collect_sentences(questions);
    if (pool.empty()) {
        warn(warnings, "topic " + std::to_string(topic.topic_id) +
                           ": no question sentences to summarize");
        Summary empty;
        empty.subject = Summary::Subject::topic_questions;
        empty.subject_id = topic.topic_id;
        empty.k = params.k_questions;
        return empty;
    }
    cap_pool(pool, params.max_pool,
             rng::mix_seed(rng::mix_seed(params.seed, kQuestionPoolStream),
                           static_cast<std::uint64_t>(topic.topic_id)));
    return select_summary(std::move(pool), Summary::Subject::topic_questions, topic.topic_id,
                          params.k_questions, spec, df, stops, params.redundancy_cos);
}

Summary summarize_question_answers(std::int64_t question_id, const CorpusView& view,
                                   const AnswerFilterPolicy& policy,
                                   const vector_space::EmbedderSpec& spec,
                                   const vector_space::DfTable& df,
                                   const prep::Stopwords& stops,
                                   const SummarizeParams& params, WarningLog* warnings) {
    const Post* question = view.post_of(question_id);
    if (!question || !question->is_question()) {
        throw UsageError("question " + std::to_string(question_id) + " is not in the corpus");
    }
    std::vector<const Post*> answers;
    if (auto it = view.index.answers_by_question.find(question_id);
        it != view.index.answers_by_question.end()) {
        for (std::size_t pos : it->second) answers.push_back(&view.posts[pos]);
    }
    std::vector<const prep::CleanDocument*> docs;
    for (const Post* answer : filter_answers(answers, policy)) {
        if (const auto* doc = view.doc_of(answer->id)) docs.push_back(doc);
    }
    std::vector<Candidate> pool = collect_sentences(docs);
    if (pool.empty()) {
        warn(warnings, "question " + std::to_string(question_id) +
                           ": no answers passed the filter");
        Summary empty;
        empty.subject = Summary::Subject::question_answers;
        empty.subject_id = question_id;
        empty.k = params.k_answers;
        return empty;
    }
    cap_pool(pool, params.max_pool,
             rng::mix_seed(rng::mix_seed(params.seed, kAnswerPoolStream),
                           static_cast<std::uint64_t>(question_id)));
    return select_summary(std::move(pool), Summary::Subject::question_answers, question_id,
                          params.k_answers, spec, df, stops, params.redundancy_cos);
}

PairedReport problems_and_solutions(const topic_model::Topic& topic, const CorpusView& view,
                                    const AnswerFilterPolicy& policy,
                                    const vector_space::EmbedderSpec& spec,
                                    const vector_space::DfTable& df,
                                    const prep::Stopwords& stops,
                                    const SummarizeParams& params, WarningLog* warnings) {
    PairedReport report;
    report.topic_id = topic.topic_id;
    Summary problems =
        summarize_topic_questions(topic, view, spec, df, stops, params, warnings);
    for (auto& item : problems.items) {
        ProblemEntry entry;
        entry.problem = std::move(item.text);
        entry.question_id = item.source_post_id;
        entry.score = item.score;
        Summary solutions = summarize_question_answers(item.source_post_id, view, policy,
                                                       spec, df, stops, params, warnings);
        entry.solutions = std::move(solutions.items);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

SummaryOutputs summarize_all(const std::vector<topic_model::Topic>& topics,
                             const CorpusView& view, const AnswerFilterPolicy& policy,
                             const vector_space::EmbedderSpec& spec,
                             const vector_space::DfTable& df, const prep::Stopwords& stops,
                             const SummarizeParams& params, WarningLog* warnings) {
    SummaryOutputs out;
    out.question_summaries = nlohmann::json::array();
    out.answer_summaries = nlohmann::json::array();
    for (const auto& topic : topics) {
        Summary questions =
            summarize_topic_questions(topic, view, spec, df, stops, params, warnings);
        nlohmann::json items = nlohmann::json::array();
        for (const auto& item : questions.items) {
            items.push_back({{"text", item.text},
                             {"question_id", item.source_post_id},
                             {"score", item.score}});
        }
        out.question_summaries.push_back({{"topic_id", topic.topic_id}, {"items", items}});

        nlohmann::json problems = nlohmann::json::array();
        for (const auto& item : questions.items) {
            Summary solutions = summarize_question_answers(
                item.source_post_id, view, policy, spec, df, stops, params, warnings);
            nlohmann::json solutions_json = nlohmann::json::array();
            for (const auto& s : solutions.items) {
                solutions_json.push_back(
                    {{"text", s.text}, {"answer_id", s.source_post_id}, {"score", s.score}});
            }
            problems.push_back({{"text", item.text},
                                {"question_id", item.source_post_id},
                                {"solutions", solutions_json}});
        }
        out.answer_summaries.push_back(
            {{"topic_id", topic.topic_id}, {"problems", problems}});
    }
    return out;
}

}  // namespace sedigest::summarize
