#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sedigest {

enum class PostType { question, answer };

std::string_view to_string(PostType t);
PostType post_type_from_string(std::string_view s);  // throws std::invalid_argument

// One Stack-Exchange item. Invariants: answers carry parent_id, questions do
// not; accepted is only meaningful on answers; ids are unique per corpus.
struct Post {
    std::int64_t id = 0;
    PostType post_type = PostType::question;
    std::optional<std::int64_t> parent_id;
    bool accepted = false;
    int score = 0;
    std::optional<std::string> title;
    std::string body_html;
    std::vector<std::string> tags;
    std::int64_t creation_date = 0;  // epoch seconds, UTC

    bool is_question() const { return post_type == PostType::question; }
    bool is_answer() const { return post_type == PostType::answer; }
};

// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and optional
// "Z" or "+HH:MM"/"-HH:MM" offset (data dumps omit the zone designator).
// Throws std::invalid_argument on malformed input.
std::int64_t parse_rfc3339(std::string_view s);
std::string format_rfc3339(std::int64_t epoch_seconds);

}  // namespace sedigest
