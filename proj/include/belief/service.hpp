#pragma once

// Minimal JSON-over-HTTP client shared by the service-backed ports.

#include <chrono>
#include <regex>
#include <semaphore>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "belief/error.hpp"

namespace belief {

struct ServiceEndpoint {
    std::string url;  // http://host:port/path
    double timeout_seconds = 10.0;
    int retries = 2;  // additional attempts after the first
    int max_in_flight = 4;
};

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path;
};

inline ParsedUrl parse_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw ConfigError("invalid service URL: " + url);
    return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

class JsonServiceClient {
public:
    JsonServiceClient(std::string backend, ServiceEndpoint ep)
        : backend_(std::move(backend)), ep_(std::move(ep)), url_(parse_url(ep_.url)),
          in_flight_(std::max(1, ep_.max_in_flight)) {}

    nlohmann::json post(const nlohmann::json& request) const {
        in_flight_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{in_flight_};

        const std::string body = request.dump();
        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt <= ep_.retries; ++attempt) {
            httplib::Client cli(url_.scheme_host_port);
            const auto t = std::chrono::duration<double>(ep_.timeout_seconds);
            cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
            cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
            auto res = cli.Post(url_.path, body, "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "HTTP status " + std::to_string(res->status);
                continue;
            }
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw BackendError(backend_, std::string("malformed response: ") + e.what());
            }
        }
        throw BackendError(backend_, last_error + " after " + std::to_string(ep_.retries + 1) + " attempt(s)");
    }

    const std::string& backend() const noexcept { return backend_; }

private:
    std::string backend_;
    ServiceEndpoint ep_;
    ParsedUrl url_;
    mutable std::counting_semaphore<> in_flight_;
};

} // namespace belief
