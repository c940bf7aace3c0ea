#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sedigest/common.hpp"
#include "sedigest/post.hpp"

namespace sedigest::se_client {

struct FetchSpec {
    std::string site = "stackoverflow";
    std::string tag;
    std::int64_t from_date = 0;  // epoch seconds, UTC
    std::int64_t to_date = 0;
    int page_size = 100;  // API bound: [1, 100]
    std::optional<std::string> api_key;
    std::optional<int> max_pages;

    void validate() const;  // throws UsageError
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// One GET at a time; implementations may block.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

class Sleeper {
  public:
    virtual ~Sleeper() = default;
    virtual void sleep_seconds(double seconds) = 0;
};

class RealSleeper : public Sleeper {
  public:
    void sleep_seconds(double seconds) override;
};

// HTTPS transport over the bundled client (gzip handled transparently).
std::unique_ptr<Transport> make_https_transport();

// Caches successful response bodies on disk keyed by request URL, so an
// interrupted crawl resumes without re-spending quota.
class CachingTransport : public Transport {
  public:
    CachingTransport(Transport& inner, std::string cache_dir);
    HttpResponse get(const std::string& url) override;

    static std::string cache_file_name(const std::string& url);

  private:
    Transport& inner_;
    std::string cache_dir_;
};

struct Progress {
    int page = 0;
    int quota_remaining = -1;  // -1 when the API omitted it
};
using ProgressFn = std::function<void(const Progress&)>;

struct QuotaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tagged-question / answer fetcher with the API's backoff discipline: an
// advertised backoff (or HTTP 429) delays the next request by the advertised
// seconds; more than 5 consecutive backoffs raise QuotaError.
class Client {
  public:
    Client(Transport& transport, Sleeper& sleeper) : transport_(transport), sleeper_(sleeper) {}

    std::vector<Post> fetch_questions(const FetchSpec& spec, const ProgressFn& progress = {});
    std::vector<Post> fetch_answers(const std::vector<std::int64_t>& question_ids,
                                    const FetchSpec& spec, const ProgressFn& progress = {});

  private:
    // Pages through one endpoint until has_more clears or the page cap hits.
    void page_loop(const std::string& base_url, const FetchSpec& spec,
                   const std::function<void(const nlohmann::json&, int page)>& on_item,
                   const ProgressFn& progress);

    nlohmann::json request_page(const std::string& url, int page);

    Transport& transport_;
    Sleeper& sleeper_;
    int consecutive_backoffs_ = 0;
    double pending_backoff_ = 0.0;
};

std::string url_encode(std::string_view value);

}  // namespace sedigest::se_client
