#include "sedigest/se_client.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "sedigest/rng.hpp"

namespace sedigest::se_client {
namespace {

using nlohmann::json;

constexpr const char* kApiBase = "https://api.stackexchange.com/2.3";
constexpr int kMaxBackoffs = 5;
constexpr double kDefault429Backoff = 10.0;

std::string lower_ascii(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

Post question_from_item(const json& item, int page) {
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("page " + std::to_string(page) +
                                 ": malformed question item: " + msg);
    };
    Post post;
    post.post_type = PostType::question;
    if (!item.contains("question_id") || !item["question_id"].is_number_integer()) {
        fail("missing question_id");
    }
    post.id = item["question_id"].get<std::int64_t>();
    if (!item.contains("body") || !item["body"].is_string()) {
        fail("missing body (use the withbody filter)");
    }
    post.body_html = item["body"].get<std::string>();
    if (item.contains("title") && item["title"].is_string()) {
        post.title = item["title"].get<std::string>();
    }
    if (item.contains("score") && item["score"].is_number_integer()) {
        post.score = item["score"].get<int>();
    }
    if (item.contains("tags") && item["tags"].is_array()) {
        for (const auto& tag : item["tags"]) {
            if (tag.is_string()) post.tags.push_back(lower_ascii(tag.get<std::string>()));
        }
    }
    if (!item.contains("creation_date") || !item["creation_date"].is_number_integer()) {
        fail("missing creation_date");
    }
    post.creation_date = item["creation_date"].get<std::int64_t>();
    return post;
}

Post answer_from_item(const json& item, int page) {
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("page " + std::to_string(page) +
                                 ": malformed answer item: " + msg);
    };
    Post post;
    post.post_type = PostType::answer;
    if (!item.contains("answer_id") || !item["answer_id"].is_number_integer()) {
        fail("missing answer_id");
    }
    post.id = item["answer_id"].get<std::int64_t>();
    if (!item.contains("question_id") || !item["question_id"].is_number_integer()) {
        fail("missing question_id");
    }
    post.parent_id = item["question_id"].get<std::int64_t>();
    if (!item.contains("body") || !item["body"].is_string()) {
        fail("missing body (use the withbody filter)");
    }
    post.body_html = item["body"].get<std::string>();
    if (item.contains("is_accepted") && item["is_accepted"].is_boolean()) {
        post.accepted = item["is_accepted"].get<bool>();
    }
    if (item.contains("score") && item["score"].is_number_integer()) {
        post.score = item["score"].get<int>();
    }
    if (!item.contains("creation_date") || !item["creation_date"].is_number_integer()) {
        fail("missing creation_date");
    }
    post.creation_date = item["creation_date"].get<std::int64_t>();
    return post;
}

}  // namespace

void FetchSpec::validate() const {
    if (site.empty()) throw UsageError("fetch requires a site");
    if (from_date >= to_date) {
        throw UsageError("fetch window is empty: from_date must precede to_date");
    }
    if (page_size < 1 || page_size > 100) {
        throw UsageError("page_size must lie in [1, 100], got " + std::to_string(page_size));
    }
    if (max_pages && *max_pages < 1) throw UsageError("max_pages must be at least 1");
}

void RealSleeper::sleep_seconds(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

std::string url_encode(std::string_view value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size());
    for (unsigned char c : value) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        }
    }
    return out;
}

CachingTransport::CachingTransport(Transport& inner, std::string cache_dir)
    : inner_(inner), cache_dir_(std::move(cache_dir)) {}

std::string CachingTransport::cache_file_name(const std::string& url) {
    char buf[36];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(rng::hash64(url, 0x10ad)),
                  static_cast<unsigned long long>(rng::hash64(url, 0x5708e)));
    return std::string(buf) + ".json";
}

HttpResponse CachingTransport::get(const std::string& url) {
    namespace fs = std::filesystem;
    fs::path file = fs::path(cache_dir_) / cache_file_name(url);
    if (std::ifstream in(file, std::ios::binary); in) {
        return {200, std::string(std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>())};
    }
    HttpResponse response = inner_.get(url);
    if (response.status == 200) {
        fs::create_directories(cache_dir_);
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        out.write(response.body.data(), static_cast<std::streamsize>(response.body.size()));
    }
    return response;
}

json Client::request_page(const std::string& url, int page) {
    for (;;) {
        if (pending_backoff_ > 0.0) {
            sleeper_.sleep_seconds(pending_backoff_);
            pending_backoff_ = 0.0;
        }
        HttpResponse response = transport_.get(url);
        if (response.status == 429) {
            if (++consecutive_backoffs_ > kMaxBackoffs) {
                throw QuotaError("quota exhausted: got HTTP 429 more than " +
                                 std::to_string(kMaxBackoffs) + " times in a row");
            }
            double wait = kDefault429Backoff;
            if (json j = json::parse(response.body, nullptr, false); !j.is_discarded()) {
                if (j.contains("backoff") && j["backoff"].is_number()) {
                    wait = j["backoff"].get<double>();
                }
            }
            pending_backoff_ = wait;
            continue;  // retry the same page after the wait
        }
        if (response.status != 200) {
            throw std::runtime_error("page " + std::to_string(page) + ": HTTP " +
                                     std::to_string(response.status));
        }
        json j = json::parse(response.body, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("items") ||
            !j["items"].is_array()) {
            throw std::runtime_error("page " + std::to_string(page) +
                                     ": malformed API payload");
        }
        if (j.contains("backoff") && j["backoff"].is_number()) {
            // The API asks us to pause before the next call; the page itself
            // is good.
            if (++consecutive_backoffs_ > kMaxBackoffs) {
                throw QuotaError("quota exhausted: the API kept demanding backoff");
            }
            pending_backoff_ = j["backoff"].get<double>();
        } else {
            consecutive_backoffs_ = 0;
        }
        return j;
    }
}

void Client::page_loop(const std::string& base_url, const FetchSpec& spec,
                       const std::function<void(const json&, int page)>& on_item,
                       const ProgressFn& progress) {
    int page = 1;
    for (;;) {
        if (spec.max_pages && page > *spec.max_pages) break;
        std::string url = base_url + "&page=" + std::to_string(page) + "&filter=withbody";
        if (spec.api_key) url += "&key=" + url_encode(*spec.api_key);
        json payload = request_page(url, page);
        for (const auto& item : payload["items"]) on_item(item, page);
        if (progress) {
            Progress p;
            p.page = page;
            if (payload.contains("quota_remaining") &&
                payload["quota_remaining"].is_number_integer()) {
                p.quota_remaining = payload["quota_remaining"].get<int>();
            }
            progress(p);
        }
        if (!payload.value("has_more", false)) break;
        ++page;
    }
}

std::vector<Post> Client::fetch_questions(const FetchSpec& spec, const ProgressFn& progress) {
    spec.validate();
    std::string url = std::string(kApiBase) + "/questions?site=" + url_encode(spec.site) +
                      "&tagged=" + url_encode(spec.tag) +
                      "&fromdate=" + std::to_string(spec.from_date) +
                      "&todate=" + std::to_string(spec.to_date) +
                      "&pagesize=" + std::to_string(spec.page_size);
    std::vector<Post> posts;
    page_loop(url, spec,
              [&](const json& item, int page) { posts.push_back(question_from_item(item, page)); },
              progress);
    return posts;
}

std::vector<Post> Client::fetch_answers(const std::vector<std::int64_t>& question_ids,
                                        const FetchSpec& spec, const ProgressFn& progress) {
    spec.validate();
    if (question_ids.empty()) {
        throw UsageError("fetch_answers requires at least one question id");
    }
    std::vector<Post> posts;
    constexpr std::size_t kBatch = 100;  // API id-vector limit
    for (std::size_t start = 0; start < question_ids.size(); start += kBatch) {
        std::string ids;
        for (std::size_t i = start; i < question_ids.size() && i < start + kBatch; ++i) {
            if (!ids.empty()) ids += ';';
            ids += std::to_string(question_ids[i]);
        }
        std::string url = std::string(kApiBase) + "/questions/" + ids +
                          "/answers?site=" + url_encode(spec.site) +
                          "&pagesize=" + std::to_string(spec.page_size);
        page_loop(url, spec,
                  [&](const json& item, int page) { posts.push_back(answer_from_item(item, page)); },
                  progress);
    }
    return posts;
}

}  // namespace sedigest::se_client
