#include "sedigest/porter.hpp"

#include <array>
#include <cstddef>

// The measure/condition machinery and the five rule steps follow the 1980
// description; within a step the longest matching suffix selects the rule
// and its condition then decides whether anything happens at all. Three
// behaviours come from the author's reference code rather than the paper:
// words of length <= 2 pass through untouched, -bli maps to -ble (not only
// -abli to -able), and -logi maps to -log.

namespace sedigest::prep {
namespace {

bool is_cons(std::string_view w, std::size_t i) {
    char c = w[i];
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_cons(w, i - 1);
        default:
            return true;
    }
}

// m in [C](VC)^m[V]: number of vowel->consonant transitions.
int measure(std::string_view stem) {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < stem.size(); ++i) {
        bool vowel = !is_cons(stem, i);
        if (prev_vowel && !vowel) ++m;
        prev_vowel = vowel;
    }
    return m;
}

bool has_vowel(std::string_view stem) {
    for (std::size_t i = 0; i < stem.size(); ++i)
        if (!is_cons(stem, i)) return true;
    return false;
}

bool ends_double_cons(std::string_view w) {
    std::size_t n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_cons(w, n - 1);
}

// *o: ends cvc where the final consonant is not w, x or y.
bool ends_cvc(std::string_view w) {
    std::size_t n = w.size();
    if (n < 3) return false;
    char last = w[n - 1];
    return is_cons(w, n - 3) && !is_cons(w, n - 2) && is_cons(w, n - 1) &&
           last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(std::string_view w, std::string_view suf) {
    return w.size() >= suf.size() && w.substr(w.size() - suf.size()) == suf;
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

enum class Cond { none, m_gt_0, m_gt_1, m_gt_1_and_st };

bool cond_holds(Cond c, std::string_view stem) {
    switch (c) {
        case Cond::none: return true;
        case Cond::m_gt_0: return measure(stem) > 0;
        case Cond::m_gt_1: return measure(stem) > 1;
        case Cond::m_gt_1_and_st:
            return measure(stem) > 1 && !stem.empty() &&
                   (stem.back() == 's' || stem.back() == 't');
    }
    return false;
}

struct CondRule {
    std::string_view suffix;
    std::string_view replacement;
    Cond cond;
};

// Longest matching suffix picks the rule; if its condition fails, no rule in
// the step fires.
template <std::size_t N>
std::string apply_step(std::string word, const std::array<CondRule, N>& rules) {
    const CondRule* best = nullptr;
    for (const auto& r : rules) {
        if (ends_with(word, r.suffix) && (!best || r.suffix.size() > best->suffix.size()))
            best = &r;
    }
    if (!best) return word;
    std::string_view stem = std::string_view(word).substr(0, word.size() - best->suffix.size());
    if (!cond_holds(best->cond, stem)) return word;
    std::string out(stem);
    out += best->replacement;
    return out;
}

std::string step1a(std::string w) {
    if (ends_with(w, "sses")) return w.substr(0, w.size() - 4) + "ss";
    if (ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "i";
    if (ends_with(w, "ss")) return w;
    if (ends_with(w, "s")) return w.substr(0, w.size() - 1);
    return w;
}

std::string step1b(std::string w) {
    if (ends_with(w, "eed")) {
        std::string_view stem = std::string_view(w).substr(0, w.size() - 3);
        if (measure(stem) > 0) return std::string(stem) + "ee";
        return w;
    }
    bool fired = false;
    if (ends_with(w, "ed")) {
        std::string_view stem = std::string_view(w).substr(0, w.size() - 2);
        if (has_vowel(stem)) {
            w.resize(w.size() - 2);
            fired = true;
        }
    } else if (ends_with(w, "ing")) {
        std::string_view stem = std::string_view(w).substr(0, w.size() - 3);
        if (has_vowel(stem)) {
            w.resize(w.size() - 3);
            fired = true;
        }
    }
    if (fired) {
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w += 'e';
        } else if (ends_double_cons(w) && w.back() != 'l' && w.back() != 's' && w.back() != 'z') {
            w.resize(w.size() - 1);
        } else if (measure(w) == 1 && ends_cvc(w)) {
            w += 'e';
        }
    }
    return w;
}

std::string step1c(std::string w) {
    if (ends_with(w, "y") && has_vowel(std::string_view(w).substr(0, w.size() - 1)))
        w.back() = 'i';
    return w;
}

constexpr std::array<CondRule, 21> kStep2{{
    {"ational", "ate", Cond::m_gt_0}, {"tional", "tion", Cond::m_gt_0},
    {"enci", "ence", Cond::m_gt_0},   {"anci", "ance", Cond::m_gt_0},
    {"izer", "ize", Cond::m_gt_0},    {"bli", "ble", Cond::m_gt_0},
    {"alli", "al", Cond::m_gt_0},     {"entli", "ent", Cond::m_gt_0},
    {"eli", "e", Cond::m_gt_0},       {"ousli", "ous", Cond::m_gt_0},
    {"ization", "ize", Cond::m_gt_0}, {"ation", "ate", Cond::m_gt_0},
    {"ator", "ate", Cond::m_gt_0},    {"alism", "al", Cond::m_gt_0},
    {"iveness", "ive", Cond::m_gt_0}, {"fulness", "ful", Cond::m_gt_0},
    {"ousness", "ous", Cond::m_gt_0}, {"aliti", "al", Cond::m_gt_0},
    {"iviti", "ive", Cond::m_gt_0},   {"biliti", "ble", Cond::m_gt_0},
    {"logi", "log", Cond::m_gt_0},
}};

constexpr std::array<CondRule, 7> kStep3{{
    {"icate", "ic", Cond::m_gt_0}, {"ative", "", Cond::m_gt_0},
    {"alize", "al", Cond::m_gt_0}, {"iciti", "ic", Cond::m_gt_0},
    {"ical", "ic", Cond::m_gt_0},  {"ful", "", Cond::m_gt_0},
    {"ness", "", Cond::m_gt_0},
}};

constexpr std::array<CondRule, 19> kStep4{{
    {"al", "", Cond::m_gt_1},    {"ance", "", Cond::m_gt_1},
    {"ence", "", Cond::m_gt_1},  {"er", "", Cond::m_gt_1},
    {"ic", "", Cond::m_gt_1},    {"able", "", Cond::m_gt_1},
    {"ible", "", Cond::m_gt_1},  {"ant", "", Cond::m_gt_1},
    {"ement", "", Cond::m_gt_1}, {"ment", "", Cond::m_gt_1},
    {"ent", "", Cond::m_gt_1},   {"ion", "", Cond::m_gt_1_and_st},
    {"ou", "", Cond::m_gt_1},    {"ism", "", Cond::m_gt_1},
    {"ate", "", Cond::m_gt_1},   {"iti", "", Cond::m_gt_1},
    {"ous", "", Cond::m_gt_1},   {"ive", "", Cond::m_gt_1},
    {"ize", "", Cond::m_gt_1},
}};

std::string step5a(std::string w) {
    if (ends_with(w, "e")) {
        std::string_view stem = std::string_view(w).substr(0, w.size() - 1);
        int m = measure(stem);
        if (m > 1 || (m == 1 && !ends_cvc(stem))) w.resize(w.size() - 1);
    }
    return w;
}

std::string step5b(std::string w) {
    if (measure(w) > 1 && ends_double_cons(w) && w.back() == 'l') w.resize(w.size() - 1);
    return w;
}

}  // namespace

std::string porter_stem(std::string_view word) {
    std::string w(word);
    if (w.size() <= 2) return w;
    w = step1a(std::move(w));
    w = step1b(std::move(w));
    w = step1c(std::move(w));
    w = apply_step(std::move(w), kStep2);
    w = apply_step(std::move(w), kStep3);
    w = apply_step(std::move(w), kStep4);
    w = step5a(std::move(w));
    w = step5b(std::move(w));
    return w;
}

}  // namespace sedigest::prep
