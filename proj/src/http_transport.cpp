// Real HTTPS transport for the Stack Exchange API, kept in its own TU so the
// header-only HTTP client is compiled exactly once.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_ZLIB_SUPPORT
#include "httplib.h"

#include "sedigest/se_client.hpp"

namespace sedigest::se_client {
namespace {

class HttplibTransport : public Transport {
  public:
    HttpResponse get(const std::string& url) override {
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) {
            throw std::runtime_error("bad URL (no scheme): " + url);
        }
        auto path_start = url.find('/', scheme_end + 3);
        std::string origin = url.substr(0, path_start);
        std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client(origin);
        client.set_connection_timeout(30);
        client.set_read_timeout(60);
        client.set_follow_location(true);
        auto result = client.Get(path);
        if (!result) {
            throw std::runtime_error("request failed: " + httplib::to_string(result.error()) +
                                     " (" + url + ")");
        }
        return {result->status, result->body};
    }
};

}  // namespace

std::unique_ptr<Transport> make_https_transport() {
    return std::make_unique<HttplibTransport>();
}

}  // namespace sedigest::se_client
