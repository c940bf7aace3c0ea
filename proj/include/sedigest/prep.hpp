#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sedigest/ingest.hpp"

namespace sedigest::prep {

class Stopwords {
  public:
    // The embedded 175-word English list (mirrored in data/stopwords_en.txt).
    static const Stopwords& builtin();
    // One lowercase word per line, '#' comments and blank lines allowed.
    static Stopwords load(const std::string& path);
    static Stopwords from_words(std::vector<std::string> words);

    bool contains(std::string_view word) const {
        return words_.find(word) != words_.end();
    }
    std::size_t size() const { return words_.size(); }
    const std::set<std::string, std::less<>>& words() const { return words_; }

  private:
    std::set<std::string, std::less<>> words_;
};

struct CleanDocument {
    std::int64_t post_id = 0;
    // Running text for summarization: lowercased, punctuation spaced out,
    // digits and apostrophes dropped, sentence terminators (.!?) kept.
    std::string text;
    // Stemmed, stop-word-filtered tokens for topic modeling.
    std::vector<std::string> tokens;
    // Byte ranges [start,end) of sentences inside text.
    std::vector<std::pair<std::size_t, std::size_t>> sentence_spans;

    bool empty() const { return tokens.empty(); }
    std::vector<std::string> sentences() const;
};

// Lowercase + scrub; keeps sentence terminators so split_sentences can work
// on the output. Idempotent.
std::string normalize_text(std::string_view raw);

CleanDocument normalize(const ingest::StrippedText& raw,
                        const Stopwords& stops = Stopwords::builtin());
CleanDocument normalize(std::int64_t post_id, std::string_view raw_text,
                        const Stopwords& stops = Stopwords::builtin());

// Sentence boundaries: terminator runs (.!?) followed by whitespace, and
// whitespace runs containing a newline. Fragments with fewer than 3 words
// merge into the following sentence (a trailing short fragment merges
// backward). Returned spans index into the input.
std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text);
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace sedigest::prep
