#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sedigest/common.hpp"
#include "sedigest/post.hpp"

#include "json.hpp"

namespace sedigest::ingest {

enum class CorpusFormat { jsonl, sedump_xml };

CorpusFormat corpus_format_from_string(std::string_view s);  // throws UsageError

// Post body with markup and code spans removed. text never contains '<' or
// '>' and never contains bytes that appeared inside <code>/<pre> spans.
struct StrippedText {
    std::int64_t post_id = 0;
    std::string text;
    int removed_code_blocks = 0;
};

struct StripOptions {
    bool include_titles = true;  // prepend question titles, separated by ". "
};

// Parses a corpus file. Rejects duplicate ids and schema violations with
// errors naming the offending line/row and field.
std::vector<Post> load_corpus(const std::string& path, CorpusFormat format);
std::vector<Post> parse_jsonl(std::istream& in);
std::vector<Post> parse_posts_xml(std::istream& in);

// JSONL record <-> Post (shared by the corpus loader and the API client).
Post post_from_json(const nlohmann::json& j);
nlohmann::json post_to_json(const Post& post);

// Removes <code>/<pre> spans (nested spans delete once), strips remaining
// tags keeping their text, decodes entities, and collapses whitespace.
// An unclosed code/pre tag deletes to end of body and logs a warning.
StrippedText strip_code(const Post& post, const StripOptions& opts = {},
                        WarningLog* warnings = nullptr);

// Core HTML-to-text transform used by strip_code.
std::string strip_html(std::string_view html, int* removed_blocks = nullptr,
                       bool* unclosed = nullptr);

// Entity decoding for the named entities that appear in Stack Exchange
// markup plus numeric character references.
std::string decode_entities(std::string_view s);

// Answer lists grouped by parent question. Orphans are answers whose parent
// is not a question present in the corpus.
struct CorpusIndex {
    std::map<std::int64_t, std::vector<std::size_t>> answers_by_question;
    std::vector<std::size_t> orphan_answers;
    std::map<std::int64_t, std::size_t> by_id;

    bool has_post(std::int64_t id) const { return by_id.count(id) != 0; }
};

CorpusIndex questions_of(const std::vector<Post>& corpus);

}  // namespace sedigest::ingest
