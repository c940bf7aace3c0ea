#include "sedigest/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace sedigest::ingest {
namespace {

using nlohmann::json;

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space_byte(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7f) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7ff) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp <= 0xffff) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

// Reads one tag starting at s[pos] == '<'. Returns the index one past the
// closing '>', or s.size() if the tag never closes. Attribute values may
// contain '>' inside quotes.
std::size_t tag_end(std::string_view s, std::size_t pos) {
    char quote = 0;
    for (std::size_t i = pos + 1; i < s.size(); ++i) {
        char c = s[i];
        if (quote != 0) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return i + 1;
        }
    }
    return s.size();
}

struct TagInfo {
    std::string name;   // lowercase element name, empty if unparsable
    bool closing = false;
    bool self_closing = false;
};

TagInfo parse_tag(std::string_view tag) {
    // tag includes the angle brackets: "<a href=..>" or "</code>".
    TagInfo info;
    std::size_t i = 1;
    if (i < tag.size() && tag[i] == '/') {
        info.closing = true;
        ++i;
    }
    while (i < tag.size() && std::isalnum(static_cast<unsigned char>(tag[i]))) {
        info.name.push_back(lower_ascii(tag[i]));
        ++i;
    }
    if (tag.size() >= 2 && tag[tag.size() - 2] == '/') info.self_closing = true;
    return info;
}

bool is_code_element(const std::string& name) {
    return name == "code" || name == "pre";
}

}  // namespace

CorpusFormat corpus_format_from_string(std::string_view s) {
    if (s == "jsonl") return CorpusFormat::jsonl;
    if (s == "sedump_xml") return CorpusFormat::sedump_xml;
    throw UsageError("unknown corpus format: " + std::string(s) +
                     " (expected jsonl or sedump_xml)");
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back('&');
            ++i;
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        std::size_t next = semi + 1;
        if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "amp") {
            out.push_back('&');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (name == "nbsp") {
            out.push_back(' ');
        } else if (name.size() >= 2 && name[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = true;
            if (name[1] == 'x' || name[1] == 'X') {
                ok = name.size() > 2;
                for (std::size_t k = 2; k < name.size() && ok; ++k) {
                    char c = lower_ascii(name[k]);
                    if (c >= '0' && c <= '9') cp = cp * 16 + (c - '0');
                    else if (c >= 'a' && c <= 'f') cp = cp * 16 + (c - 'a' + 10);
                    else ok = false;
                    if (cp > 0x10ffff) ok = false;
                }
            } else {
                for (std::size_t k = 1; k < name.size() && ok; ++k) {
                    char c = name[k];
                    if (c >= '0' && c <= '9') cp = cp * 10 + (c - '0');
                    else ok = false;
                    if (cp > 0x10ffff) ok = false;
                }
            }
            if (ok) {
                append_utf8(out, cp);
            } else {
                out.push_back('&');
                i += 1;
                continue;
            }
        } else {
            out.push_back('&');
            ++i;
            continue;
        }
        i = next;
    }
    return out;
}

std::string strip_html(std::string_view html, int* removed_blocks, bool* unclosed) {
    std::string text;
    text.reserve(html.size());
    int depth = 0;       // nesting depth inside <code>/<pre>
    int removed = 0;     // top-level deleted spans
    std::size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c != '<') {
            if (depth == 0) text.push_back(c);
            ++i;
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            std::size_t end = html.find("-->", i + 4);
            i = (end == std::string_view::npos) ? html.size() : end + 3;
            if (depth == 0) text.push_back(' ');
            continue;
        }
        std::size_t end = tag_end(html, i);
        TagInfo tag = parse_tag(html.substr(i, end - i));
        if (tag.name.empty() && !tag.closing) {
            // Stray '<' that opens no tag; drop it as markup noise.
            if (depth == 0) text.push_back(' ');
            ++i;
            continue;
        }
        if (is_code_element(tag.name)) {
            if (tag.closing) {
                if (depth > 0) --depth;
                // Deleted span acts as a word boundary.
                if (depth == 0) text.push_back(' ');
            } else if (tag.self_closing) {
                if (depth == 0) {
                    ++removed;
                    text.push_back(' ');
                }
            } else {
                if (depth == 0) ++removed;
                ++depth;
            }
        } else {
            if (depth == 0) text.push_back(' ');
        }
        i = end;
    }
    if (removed_blocks) *removed_blocks = removed;
    if (unclosed) *unclosed = depth > 0;
    text = decode_entities(text);
    for (char& c : text) {
        if (c == '<' || c == '>') c = ' ';
    }
    return collapse_whitespace(text);
}

StrippedText strip_code(const Post& post, const StripOptions& opts, WarningLog* warnings) {
    StrippedText out;
    out.post_id = post.id;
    bool unclosed = false;
    std::string body = strip_html(post.body_html, &out.removed_code_blocks, &unclosed);
    if (unclosed) {
        warn(warnings, "post " + std::to_string(post.id) +
                           ": unclosed <code>/<pre> tag, dropped text to end of body");
    }
    if (opts.include_titles && post.is_question() && post.title && !post.title->empty()) {
        std::string title = strip_html(*post.title);
        if (title.empty()) {
            out.text = std::move(body);
        } else if (body.empty()) {
            out.text = std::move(title);
        } else {
            out.text = title + ". " + body;
        }
    } else {
        out.text = std::move(body);
    }
    return out;
}

Post post_from_json(const json& j) {
    if (!j.is_object()) throw UsageError("post record is not a JSON object");
    auto require = [&](const char* field) -> const json& {
        auto it = j.find(field);
        if (it == j.end() || it->is_null()) {
            throw UsageError(std::string("missing field: ") + field);
        }
        return *it;
    };
    auto require_int = [&](const char* field) -> std::int64_t {
        const json& v = require(field);
        if (!v.is_number_integer()) {
            throw UsageError(std::string("field is not an integer: ") + field);
        }
        return v.get<std::int64_t>();
    };

    Post post;
    post.id = require_int("id");
    if (post.id <= 0) throw UsageError("field id must be positive");
    const json& type = require("post_type");
    if (!type.is_string()) throw UsageError("field is not a string: post_type");
    try {
        post.post_type = post_type_from_string(type.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (auto it = j.find("parent_id"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw UsageError("field is not an integer: parent_id");
        post.parent_id = it->get<std::int64_t>();
    }
    if (auto it = j.find("accepted"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) throw UsageError("field is not a boolean: accepted");
        post.accepted = it->get<bool>();
    }
    post.score = static_cast<int>(require_int("score"));
    if (auto it = j.find("title"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw UsageError("field is not a string: title");
        post.title = it->get<std::string>();
    }
    const json& body = require("body_html");
    if (!body.is_string()) throw UsageError("field is not a string: body_html");
    post.body_html = body.get<std::string>();
    if (auto it = j.find("tags"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw UsageError("field is not an array: tags");
        for (const json& t : *it) {
            if (!t.is_string()) throw UsageError("field tags contains a non-string");
            std::string tag = t.get<std::string>();
            std::transform(tag.begin(), tag.end(), tag.begin(), lower_ascii);
            post.tags.push_back(std::move(tag));
        }
    }
    const json& created = require("creation_date");
    if (created.is_number_integer()) {
        post.creation_date = created.get<std::int64_t>();
    } else if (created.is_string()) {
        try {
            post.creation_date = parse_rfc3339(created.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("field creation_date: ") + e.what());
        }
    } else {
        throw UsageError("field creation_date must be an RFC 3339 string or epoch seconds");
    }

    if (post.is_question()) {
        if (post.parent_id) throw UsageError("question has a parent_id");
        if (post.accepted) throw UsageError("question marked accepted");
    } else {
        if (!post.parent_id) throw UsageError("answer missing parent_id");
    }
    return post;
}

json post_to_json(const Post& post) {
    json j;
    j["id"] = post.id;
    j["post_type"] = to_string(post.post_type);
    if (post.parent_id) j["parent_id"] = *post.parent_id;
    j["accepted"] = post.accepted;
    j["score"] = post.score;
    if (post.title) j["title"] = *post.title;
    j["body_html"] = post.body_html;
    j["tags"] = post.tags;
    j["creation_date"] = format_rfc3339(post.creation_date);
    return j;
}

std::vector<Post> parse_jsonl(std::istream& in) {
    std::vector<Post> corpus;
    std::set<std::int64_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view trimmed = line;
        while (!trimmed.empty() && is_space_byte(trimmed.back())) trimmed.remove_suffix(1);
        while (!trimmed.empty() && is_space_byte(trimmed.front())) trimmed.remove_prefix(1);
        if (trimmed.empty()) continue;
        json j;
        try {
            j = json::parse(trimmed);
        } catch (const json::parse_error& e) {
            throw UsageError("line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        try {
            corpus.push_back(post_from_json(j));
        } catch (const UsageError& e) {
            throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen.insert(corpus.back().id).second) {
            throw UsageError("line " + std::to_string(lineno) + ": duplicate post id " +
                             std::to_string(corpus.back().id));
        }
    }
    return corpus;
}

namespace {

// Attributes of one <row .../> element.
std::map<std::string, std::string> parse_row_attributes(std::string_view row) {
    std::map<std::string, std::string> attrs;
    std::size_t i = 0;
    while (i < row.size()) {
        while (i < row.size() && !std::isalpha(static_cast<unsigned char>(row[i]))) ++i;
        std::size_t name_start = i;
        while (i < row.size() && (std::isalnum(static_cast<unsigned char>(row[i])) || row[i] == '_')) ++i;
        if (i == name_start) break;
        std::string name(row.substr(name_start, i - name_start));
        while (i < row.size() && is_space_byte(row[i])) ++i;
        if (i >= row.size() || row[i] != '=') continue;  // bare attribute
        ++i;
        while (i < row.size() && is_space_byte(row[i])) ++i;
        if (i >= row.size() || (row[i] != '"' && row[i] != '\'')) break;
        char quote = row[i++];
        std::size_t val_start = i;
        while (i < row.size() && row[i] != quote) ++i;
        attrs[name] = decode_entities(row.substr(val_start, i - val_start));
        if (i < row.size()) ++i;
    }
    return attrs;
}

// "<jenkins><linux>" or "|jenkins|linux|" -> {"jenkins", "linux"}
std::vector<std::string> parse_tag_list(const std::string& raw) {
    std::vector<std::string> tags;
    std::string current;
    for (char c : raw) {
        if (c == '<' || c == '>' || c == '|') {
            if (!current.empty()) tags.push_back(current);
            current.clear();
        } else {
            current.push_back(lower_ascii(c));
        }
    }
    if (!current.empty()) tags.push_back(current);
    return tags;
}

}  // namespace

std::vector<Post> parse_posts_xml(std::istream& in) {
    std::string xml((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<Post> corpus;
    std::set<std::int64_t> seen;
    std::map<std::int64_t, std::int64_t> accepted_of;  // question id -> answer id
    std::size_t rowno = 0;
    std::size_t pos = 0;
    while (true) {
        std::size_t start = xml.find("<row", pos);
        if (start == std::string::npos) break;
        // Guard against names like <rowset>.
        char after = start + 4 < xml.size() ? xml[start + 4] : ' ';
        std::size_t end = tag_end(xml, start);
        pos = end;
        if (!is_space_byte(after) && after != '/' && after != '>') continue;
        ++rowno;
        auto fail = [&](const std::string& msg) {
            throw UsageError("row " + std::to_string(rowno) + ": " + msg);
        };
        auto attrs = parse_row_attributes(
            std::string_view(xml).substr(start + 4, end - start - 4));
        auto get = [&](const char* name) -> const std::string* {
            auto it = attrs.find(name);
            return it == attrs.end() ? nullptr : &it->second;
        };
        auto get_int = [&](const char* name) -> std::optional<std::int64_t> {
            const std::string* raw = get(name);
            if (!raw) return std::nullopt;
            try {
                return std::stoll(*raw);
            } catch (const std::exception&) {
                fail(std::string("attribute ") + name + " is not an integer: " + *raw);
                return std::nullopt;  // unreachable
            }
        };

        auto type_id = get_int("PostTypeId");
        if (!type_id) fail("missing attribute PostTypeId");
        if (*type_id != 1 && *type_id != 2) continue;  // wiki/moderator rows etc.

        Post post;
        auto id = get_int("Id");
        if (!id) fail("missing attribute Id");
        post.id = *id;
        if (post.id <= 0) fail("attribute Id must be positive");
        post.post_type = (*type_id == 1) ? PostType::question : PostType::answer;
        post.score = static_cast<int>(get_int("Score").value_or(0));
        const std::string* body = get("Body");
        if (!body) fail("missing attribute Body");
        post.body_html = *body;
        if (const std::string* date = get("CreationDate")) {
            try {
                post.creation_date = parse_rfc3339(*date);
            } catch (const std::invalid_argument& e) {
                fail(std::string("attribute CreationDate: ") + e.what());
            }
        } else {
            fail("missing attribute CreationDate");
        }
        if (post.is_question()) {
            if (const std::string* title = get("Title")) post.title = *title;
            if (const std::string* tags = get("Tags")) post.tags = parse_tag_list(*tags);
            if (auto acc = get_int("AcceptedAnswerId")) accepted_of[post.id] = *acc;
        } else {
            auto parent = get_int("ParentId");
            if (!parent) fail("answer row missing attribute ParentId");
            post.parent_id = *parent;
        }
        if (!seen.insert(post.id).second) {
            fail("duplicate post id " + std::to_string(post.id));
        }
        corpus.push_back(std::move(post));
    }
    for (Post& post : corpus) {
        if (!post.is_answer() || !post.parent_id) continue;
        auto it = accepted_of.find(*post.parent_id);
        if (it != accepted_of.end() && it->second == post.id) post.accepted = true;
    }
    return corpus;
}

std::vector<Post> load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open corpus file: " + path);
    try {
        return format == CorpusFormat::jsonl ? parse_jsonl(in) : parse_posts_xml(in);
    } catch (const UsageError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

CorpusIndex questions_of(const std::vector<Post>& corpus) {
    CorpusIndex index;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        index.by_id[corpus[i].id] = i;
        if (corpus[i].is_question()) index.answers_by_question[corpus[i].id];
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Post& post = corpus[i];
        if (!post.is_answer()) continue;
        auto it = post.parent_id ? index.answers_by_question.find(*post.parent_id)
                                 : index.answers_by_question.end();
        if (it == index.answers_by_question.end()) {
            index.orphan_answers.push_back(i);
        } else {
            it->second.push_back(i);
        }
    }
    return index;
}

}  // namespace sedigest::ingest
