#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sedigest/ingest.hpp"
#include "sedigest/post.hpp"
#include "sedigest/prep.hpp"
#include "sedigest/topic_model.hpp"
#include "sedigest/vector_space.hpp"

namespace sedigest::summarize {

struct SummaryItem {
    std::string text;  // verbatim sentence from the source post's normalized text
    std::int64_t source_post_id = 0;
    double score = 0.0;  // centroid cosine, in [-1, 1]
};

struct Summary {
    enum class Subject { topic_questions, question_answers };
    Subject subject = Subject::topic_questions;
    std::int64_t subject_id = 0;  // topic_id or question post id
    std::vector<SummaryItem> items;
    int k = 0;  // requested length; |items| <= k
};

// Keep an answer iff accepted or score strictly above the threshold.
struct AnswerFilterPolicy {
    double global_mean = 0.0;               // corpus-wide mean answer score
    std::optional<int> explicit_threshold;  // overrides the mean when set

    double threshold() const {
        return explicit_threshold ? double(*explicit_threshold) : global_mean;
    }
};

// How sentences are ranked. Only centroid cosine is implemented; the enum is
// the seam where a graph-centrality scorer would slot in.
enum class SentenceScorer { centroid_cosine };

struct SummarizeParams {
    int k_questions = 3;
    int k_answers = 1;
    double redundancy_cos = 0.95;  // drop candidates this close to a pick
    int max_pool = 2000;           // sentence pool cap before seeded sampling
    SentenceScorer scorer = SentenceScorer::centroid_cosine;
    std::uint64_t seed = 0;
};

// Aligned corpus slices shared by the summarization entry points.
struct CorpusView {
    const std::vector<Post>& posts;
    const std::vector<prep::CleanDocument>& docs;  // docs[i] belongs to posts[i]
    const ingest::CorpusIndex& index;

    const Post* post_of(std::int64_t id) const;
    const prep::CleanDocument* doc_of(std::int64_t id) const;
};

// Mean score over all answers in the corpus; error when there are none.
double answer_threshold(const std::vector<Post>& corpus);

std::vector<const Post*> filter_answers(const std::vector<const Post*>& answers,
                                        const AnswerFilterPolicy& policy);

// Cosine of each sentence's embedding against the pool centroid; sentences
// that embed to zero score -1.
std::vector<double> score_sentences(const std::vector<std::string>& sentences,
                                    const vector_space::EmbedderSpec& spec,
                                    const vector_space::DfTable& df,
                                    const prep::Stopwords& stops);

Summary summarize_topic_questions(const topic_model::Topic& topic, const CorpusView& view,
                                  const vector_space::EmbedderSpec& spec,
                                  const vector_space::DfTable& df,
                                  const prep::Stopwords& stops,
                                  const SummarizeParams& params,
                                  WarningLog* warnings = nullptr);

Summary summarize_question_answers(std::int64_t question_id, const CorpusView& view,
                                   const AnswerFilterPolicy& policy,
                                   const vector_space::EmbedderSpec& spec,
                                   const vector_space::DfTable& df,
                                   const prep::Stopwords& stops,
                                   const SummarizeParams& params,
                                   WarningLog* warnings = nullptr);

// One problem sentence with the solution summary of its source question.
struct ProblemEntry {
    std::string problem;
    std::int64_t question_id = 0;
    double score = 0.0;
    std::vector<SummaryItem> solutions;
};

struct PairedReport {
    int topic_id = 0;
    std::vector<ProblemEntry> entries;
};

PairedReport problems_and_solutions(const topic_model::Topic& topic, const CorpusView& view,
                                    const AnswerFilterPolicy& policy,
                                    const vector_space::EmbedderSpec& spec,
                                    const vector_space::DfTable& df,
                                    const prep::Stopwords& stops,
                                    const SummarizeParams& params,
                                    WarningLog* warnings = nullptr);

// The two summary artifacts over every topic.
struct SummaryOutputs {
    nlohmann::json question_summaries;  // [{topic_id, items:[{text, question_id, score}]}]
    nlohmann::json answer_summaries;    // [{topic_id, problems:[…]}]
};

SummaryOutputs summarize_all(const std::vector<topic_model::Topic>& topics,
                             const CorpusView& view, const AnswerFilterPolicy& policy,
                             const vector_space::EmbedderSpec& spec,
                             const vector_space::DfTable& df, const prep::Stopwords& stops,
                             const SummarizeParams& params, WarningLog* warnings = nullptr);

}  // namespace sedigest::summarize
