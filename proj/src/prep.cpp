#include "sedigest/prep.hpp"

#include <fstream>

#include "sedigest/common.hpp"
#include "sedigest/porter.hpp"

namespace sedigest::prep {
namespace {

// Keep in sync with data/stopwords_en.txt (asserted by a unit test).
constexpr const char* kBuiltinStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "although", "always",
    "am", "among", "an", "and", "another", "any", "anyone", "anything", "anywhere", "are",
    "around", "as", "at", "away", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "cannot", "cant", "could", "did", "do", "does",
    "doesnt", "doing", "dont", "down", "during", "each", "either", "else", "enough", "even",
    "ever", "every", "everything", "everywhere", "few", "for", "from", "further", "had", "has",
    "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how",
    "however", "i", "if", "im", "in", "instead", "into", "is", "it", "its", "itself", "ive",
    "just", "least", "less", "many", "may", "maybe", "me", "might", "more", "most", "much",
    "must", "my", "myself", "never", "no", "nor", "not", "now", "of", "off", "on", "once",
    "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "rather", "same",
    "she", "should", "since", "so", "some", "someone", "something", "still", "such", "than",
    "that", "thats", "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "though", "through", "to", "too", "under", "unless", "until",
    "up", "us", "very", "was", "we", "were", "what", "when", "where", "whether", "which",
    "while", "who", "whom", "whose", "why", "will", "with", "within", "without", "would",
    "yet", "you", "your", "yours", "yourself", "yourselves"};

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_alpha(char c) { return c >= 'a' && c <= 'z'; }

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

struct Fragment {
    std::size_t begin, end;
    int words;
};

int count_words(std::string_view text, std::size_t begin, std::size_t end) {
    int words = 0;
    bool in_word = false;
    for (std::size_t i = begin; i < end; ++i) {
        char c = text[i];
        bool alpha = is_alpha(c) || (c >= 'A' && c <= 'Z');
        if (alpha && !in_word) ++words;
        in_word = alpha;
    }
    return words;
}

// Cuts text at terminator runs followed by whitespace and at whitespace runs
// containing a newline. No merging yet; empty pieces are dropped.
std::vector<Fragment> scan_fragments(std::string_view text) {
    std::vector<Fragment> fragments;
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        while (start < end && is_space(text[start])) ++start;
        std::size_t stop = end;
        while (stop > start && is_space(text[stop - 1])) --stop;
        if (stop > start && count_words(text, start, stop) > 0) {
            fragments.push_back({start, stop, count_words(text, start, stop)});
        }
    };
    while (i < text.size()) {
        if (is_terminator(text[i])) {
            std::size_t run = i;
            while (run < text.size() && is_terminator(text[run])) ++run;
            if (run == text.size() || is_space(text[run])) {
                flush(i);
                while (run < text.size() && is_space(text[run])) ++run;
                start = run;
                i = run;
                continue;
            }
            i = run;  // terminator glued to following text ("e.g" style)
            continue;
        }
        if (is_space(text[i])) {
            std::size_t run = i;
            bool newline = false;
            while (run < text.size() && is_space(text[run])) {
                newline |= text[run] == '\n' || text[run] == '\r';
                ++run;
            }
            if (newline) {
                flush(i);
                start = run;
            }
            i = run;
            continue;
        }
        ++i;
    }
    flush(text.size());
    return fragments;
}

// Merge fragments under 3 words into the following fragment; a short
// trailing fragment merges backward. Merged spans keep the separator
// bytes between them so every sentence stays a verbatim substring.
std::vector<std::pair<std::size_t, std::size_t>> merge_fragments(
    const std::vector<Fragment>& fragments) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t f = 0;
    while (f < fragments.size()) {
        std::size_t begin = fragments[f].begin;
        std::size_t end = fragments[f].end;
        int words = fragments[f].words;
        while (words < 3 && f + 1 < fragments.size()) {
            ++f;
            end = fragments[f].end;
            words += fragments[f].words;
        }
        if (words < 3 && !spans.empty()) {
            spans.back().second = end;  // trailing shorty joins its predecessor
        } else {
            spans.emplace_back(begin, end);
        }
        ++f;
    }
    return spans;
}

// out_at, when given, receives for every raw index the output length before
// that byte was consumed, plus one final entry for the end of input.
std::string normalize_text_mapped(std::string_view raw, std::vector<std::size_t>* out_at) {
    std::string out;
    out.reserve(raw.size());
    if (out_at) {
        out_at->clear();
        out_at->reserve(raw.size() + 1);
    }
    bool pending_space = false;
    for (char raw_c : raw) {
        if (out_at) out_at->push_back(out.size());
        unsigned char uc = static_cast<unsigned char>(raw_c);
        char c = raw_c;
        if (uc >= 'A' && uc <= 'Z') c = static_cast<char>(uc - 'A' + 'a');
        if (c == '\'' || (c >= '0' && c <= '9')) continue;  // deleted outright
        if (is_alpha(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        } else if (is_terminator(c)) {
            // Terminators attach to the preceding word: "word ." -> "word."
            pending_space = false;
            if (!out.empty()) out.push_back(c);
        } else {
            pending_space = true;  // whitespace, punctuation, non-ASCII
        }
    }
    if (out_at) out_at->push_back(out.size());
    return out;
}

}  // namespace

const Stopwords& Stopwords::builtin() {
    static const Stopwords instance = [] {
        Stopwords s;
        for (const char* w : kBuiltinStopwords) s.words_.emplace(w);
        return s;
    }();
    return instance;
}

Stopwords Stopwords::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open stop-word file: " + path);
    Stopwords s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        std::string word = line.substr(begin, end - begin + 1);
        for (char c : word) {
            if (!is_alpha(c)) {
                throw UsageError(path + ": line " + std::to_string(lineno) +
                                 ": stop word must match [a-z]+: " + word);
            }
        }
        s.words_.insert(std::move(word));
    }
    return s;
}

Stopwords Stopwords::from_words(std::vector<std::string> words) {
    Stopwords s;
    for (std::string& w : words) s.words_.insert(std::move(w));
    return s;
}

std::string normalize_text(std::string_view raw) { return normalize_text_mapped(raw, nullptr); }

std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text) {
    return merge_fragments(scan_fragments(text));
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    for (auto [begin, end] : sentence_spans(text)) {
        sentences.emplace_back(text.substr(begin, end - begin));
    }
    return sentences;
}

std::vector<std::string> CleanDocument::sentences() const {
    std::vector<std::string> out;
    out.reserve(sentence_spans.size());
    for (auto [begin, end] : sentence_spans) out.push_back(text.substr(begin, end - begin));
    return out;
}

CleanDocument normalize(std::int64_t post_id, std::string_view raw_text, const Stopwords& stops) {
    CleanDocument doc;
    doc.post_id = post_id;
    std::vector<std::size_t> out_at;
    doc.text = normalize_text_mapped(raw_text, &out_at);
    std::size_t i = 0;
    while (i < doc.text.size()) {
        if (!is_alpha(doc.text[i])) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < doc.text.size() && is_alpha(doc.text[i])) ++i;
        std::string_view word(doc.text.data() + begin, i - begin);
        if (stops.contains(word)) continue;
        std::string stem = porter_stem(word);
        if (stops.contains(stem)) continue;
        doc.tokens.push_back(std::move(stem));
    }
    // Sentence boundaries come from the raw text (normalization flattens the
    // newlines that separate list items), then map into the clean text.
    std::vector<Fragment> mapped;
    for (const Fragment& f : scan_fragments(raw_text)) {
        std::size_t begin = out_at[f.begin];
        std::size_t end = out_at[f.end];
        while (begin < end && doc.text[begin] == ' ') ++begin;
        while (end > begin && doc.text[end - 1] == ' ') --end;
        int words = count_words(doc.text, begin, end);
        if (end > begin && words > 0) mapped.push_back({begin, end, words});
    }
    doc.sentence_spans = merge_fragments(mapped);
    return doc;
}

CleanDocument normalize(const ingest::StrippedText& raw, const Stopwords& stops) {
    return normalize(raw.post_id, raw.text, stops);
}

}  // namespace sedigest::prep
