#include "sedigest/post.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace sedigest {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

int parse_int(std::string_view s, std::size_t pos, std::size_t len) {
    if (pos + len > s.size()) throw std::invalid_argument("timestamp too short");
    int v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc() || p != s.data() + pos + len)
        throw std::invalid_argument("timestamp has a non-numeric field");
    return v;
}

void expect(std::string_view s, std::size_t pos, char c) {
    if (pos >= s.size() || s[pos] != c)
        throw std::invalid_argument(std::string("timestamp missing '") + c + "' separator");
}

}  // namespace

std::string_view to_string(PostType t) {
    return t == PostType::question ? "question" : "answer";
}

PostType post_type_from_string(std::string_view s) {
    if (s == "question") return PostType::question;
    if (s == "answer") return PostType::answer;
    throw std::invalid_argument("post_type must be \"question\" or \"answer\"");
}

std::int64_t parse_rfc3339(std::string_view s) {
    // YYYY-MM-DDTHH:MM:SS[.frac][Z|+HH:MM|-HH:MM]
    int year = parse_int(s, 0, 4);
    expect(s, 4, '-');
    int month = parse_int(s, 5, 2);
    expect(s, 7, '-');
    int day = parse_int(s, 8, 2);
    if (10 >= s.size() || (s[10] != 'T' && s[10] != 't'))
        throw std::invalid_argument("timestamp missing 'T' separator");
    int hour = parse_int(s, 11, 2);
    expect(s, 13, ':');
    int minute = parse_int(s, 14, 2);
    expect(s, 16, ':');
    int second = parse_int(s, 17, 2);
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos, ++digits;
        if (digits == 0) throw std::invalid_argument("timestamp has an empty fraction");
    }
    std::int64_t offset = 0;
    if (pos < s.size()) {
        char c = s[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int oh = parse_int(s, pos + 1, 2);
            expect(s, pos + 3, ':');
            int om = parse_int(s, pos + 4, 2);
            offset = (c == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
            pos += 6;
        }
    }
    if (pos != s.size()) throw std::invalid_argument("timestamp has trailing characters");
    if (month < 1 || month > 12 || hour > 23 || minute > 59 || second > 60)
        throw std::invalid_argument("timestamp field out of range");
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    static constexpr int kMonthDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int month_days = kMonthDays[month - 1] + (month == 2 && leap ? 1 : 0);
    if (day < 1 || day > month_days)
        throw std::invalid_argument("timestamp day out of range for month");
    std::int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::string format_rfc3339(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

}  // namespace sedigest
